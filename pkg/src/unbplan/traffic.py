"""IoT and incumbent transmission generation, SINR evaluation, and decoding logs.

The simulation engine is split in two stages so that optimization benchmarks
can replay many band assignments against one frozen realization:

* a :class:`Realization` freezes the device populations and the event stream
  (both independent of any base-station assignment), and evaluates the SINR of
  every packet repetition at a fixed set of receiver locations;
* :func:`build_decoding_log` turns a SINR matrix plus a receiver/band
  configuration into per-location decoding counts.

Fading gains are drawn per (event, receiver-location) pair, so replaying a
different assignment against the same realization sees identical randomness.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from unbplan import geometry
from unbplan._kernels import interference_matrix
from unbplan.geometry import AreaRegion, Location, NetworkLayout

__all__ = [
    "TrafficProfile",
    "IncumbentProfile",
    "ChannelParams",
    "TransmissionEvent",
    "EventSet",
    "Receiver",
    "DecodingLog",
    "Realization",
    "generate_iot_events",
    "generate_incumbent_events",
    "interferers_of",
    "sinr_at",
    "simulate_realization",
    "build_decoding_log",
    "run_simulation",
    "save_log_csv",
]

SECONDS_PER_HOUR = 3600.0


@dataclass(frozen=True)
class TrafficProfile:
    """Uplink traffic parameters of the UNB IoT population."""

    packets_per_hour: float
    repetitions: int
    packet_duration_s: float
    signal_bandwidth_hz: float
    num_bands: int
    band_width_hz: float
    tx_power_w: float = 1.0

    def __post_init__(self) -> None:
        if self.packets_per_hour < 0:
            raise ValueError("packets_per_hour must be >= 0")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.packet_duration_s <= 0:
            raise ValueError("packet_duration_s must be > 0")
        if self.num_bands < 1:
            raise ValueError("num_bands must be >= 1")
        if not 0 < self.signal_bandwidth_hz < self.band_width_hz:
            raise ValueError("need 0 < signal bandwidth < band width")

    @property
    def total_bandwidth_hz(self) -> float:
        return self.num_bands * self.band_width_hz


@dataclass(frozen=True)
class IncumbentProfile:
    """Traffic parameters of the coexisting incumbent population."""

    packets_per_hour: float
    repetitions: int
    packet_duration_s: float
    bandwidth_hz: float
    band_pmf: tuple[float, ...]
    tx_power_w: float = 1.0

    def __post_init__(self) -> None:
        pmf = tuple(float(p) for p in self.band_pmf)
        object.__setattr__(self, "band_pmf", pmf)
        if self.packets_per_hour < 0:
            raise ValueError("packets_per_hour must be >= 0")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.packet_duration_s <= 0:
            raise ValueError("packet_duration_s must be > 0")
        if any(p < 0 for p in pmf) or abs(sum(pmf) - 1.0) > 1e-9:
            raise ValueError("band_pmf must be a probability vector")


@dataclass(frozen=True)
class ChannelParams:
    """Pathloss, noise, and decoding-threshold parameters.

    ``noise_ratio`` and ``incumbent_ratio`` are the noise power and incumbent
    transmit power expressed as fractions of the IoT transmit power;
    ``decode_threshold`` is the linear SINR ratio required for decoding.
    """

    pathloss_exponent: float
    noise_ratio: float
    incumbent_ratio: float
    decode_threshold: float

    def __post_init__(self) -> None:
        if self.pathloss_exponent <= 2:
            raise ValueError("pathloss exponent must be > 2 for integrability")
        if self.decode_threshold <= 0:
            raise ValueError("decode threshold must be > 0")
        if self.noise_ratio < 0 or self.incumbent_ratio < 0:
            raise ValueError("power ratios must be >= 0")


@dataclass(frozen=True)
class TransmissionEvent:
    source_kind: str  # "iot" | "incumbent"
    device_id: int
    packet_index: int
    repetition_index: int  # 1-based, <= R
    start_s: float
    duration_s: float
    center_frequency_hz: float
    band: int  # 0-based
    bandwidth_hz: float
    source_location: Location


class EventSet(Sequence):
    """Column-oriented event container; behaves as a sequence of events."""

    __slots__ = ("start", "duration", "freq", "bandwidth", "band", "kind",
                 "device", "packet", "rep", "src_x", "src_y")

    def __init__(self, start, duration, freq, bandwidth, band, kind, device,
                 packet, rep, src_x, src_y):
        self.start = np.asarray(start, dtype=float)
        self.duration = np.asarray(duration, dtype=float)
        self.freq = np.asarray(freq, dtype=float)
        self.bandwidth = np.asarray(bandwidth, dtype=float)
        self.band = np.asarray(band, dtype=np.int32)
        self.kind = np.asarray(kind, dtype=np.int8)  # 0 iot, 1 incumbent
        self.device = np.asarray(device, dtype=np.int64)
        self.packet = np.asarray(packet, dtype=np.int64)
        self.rep = np.asarray(rep, dtype=np.int32)
        self.src_x = np.asarray(src_x, dtype=float)
        self.src_y = np.asarray(src_y, dtype=float)

    @classmethod
    def empty(cls) -> "EventSet":
        z: list = [[]] * 11
        return cls(*z)

    def __len__(self) -> int:
        return self.start.shape[0]

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        return TransmissionEvent(
            source_kind="iot" if self.kind[i] == 0 else "incumbent",
            device_id=int(self.device[i]),
            packet_index=int(self.packet[i]),
            repetition_index=int(self.rep[i]),
            start_s=float(self.start[i]),
            duration_s=float(self.duration[i]),
            center_frequency_hz=float(self.freq[i]),
            band=int(self.band[i]),
            bandwidth_hz=float(self.bandwidth[i]),
            source_location=Location.from_xy(float(self.src_x[i]), float(self.src_y[i])),
        )

    @classmethod
    def concat(cls, sets: Iterable["EventSet"]) -> "EventSet":
        sets = [s for s in sets if len(s) > 0]
        if not sets:
            return cls.empty()
        cols = {}
        for name in cls.__slots__:
            cols[name] = np.concatenate([getattr(s, name) for s in sets])
        return cls(**cols)

    def sorted_by_start(self) -> "EventSet":
        order = np.argsort(self.start, kind="stable")
        cols = {name: getattr(self, name)[order] for name in self.__slots__}
        return EventSet(**cols)


def _device_xy(devices) -> np.ndarray:
    if isinstance(devices, np.ndarray):
        return devices.reshape(-1, 2).astype(float)
    return np.array([[d.x, d.y] for d in devices], dtype=float).reshape(-1, 2)


def _band_of(freq: np.ndarray, band_width: float, num_bands: int) -> np.ndarray:
    band = np.floor(freq / band_width).astype(np.int32)
    return np.clip(band, 0, num_bands - 1)


def generate_iot_events(
    profile: TrafficProfile,
    devices,
    horizon_s: float,
    rng: np.random.Generator,
) -> EventSet:
    """Poisson packet arrivals per device; each packet yields R back-to-back
    repetitions with independent uniform center frequencies over the full
    multiplexing range."""
    if horizon_s <= 0:
        raise ValueError("horizon must be > 0")
    xy = _device_xy(devices)
    n_dev = xy.shape[0]
    if n_dev == 0 or profile.packets_per_hour == 0:
        return EventSet.empty()
    rate = profile.packets_per_hour * horizon_s / SECONDS_PER_HOUR
    counts = rng.poisson(rate, n_dev)
    total_packets = int(counts.sum())
    if total_packets == 0:
        return EventSet.empty()
    dev = np.repeat(np.arange(n_dev), counts)
    arrivals = rng.uniform(0.0, horizon_s, total_packets)
    pkt = np.concatenate([np.arange(1, c + 1) for c in counts]) if total_packets else np.array([])

    R = profile.repetitions
    T = profile.packet_duration_s
    n_ev = total_packets * R
    rep = np.tile(np.arange(1, R + 1), total_packets)
    ev_dev = np.repeat(dev, R)
    ev_pkt = np.repeat(pkt, R)
    start = np.repeat(arrivals, R) + (rep - 1) * T
    w = profile.signal_bandwidth_hz
    top = profile.total_bandwidth_hz
    freq = rng.uniform(w / 2.0, top - w / 2.0, n_ev)
    band = _band_of(freq, profile.band_width_hz, profile.num_bands)
    return EventSet(
        start=start,
        duration=np.full(n_ev, T),
        freq=freq,
        bandwidth=np.full(n_ev, w),
        band=band,
        kind=np.zeros(n_ev, dtype=np.int8),
        device=ev_dev,
        packet=ev_pkt,
        rep=rep,
        src_x=xy[ev_dev, 0],
        src_y=xy[ev_dev, 1],
    )


def generate_incumbent_events(
    profile: IncumbentProfile,
    devices,
    horizon_s: float,
    rng: np.random.Generator,
    band_width_hz: Optional[float] = None,
    num_bands: Optional[int] = None,
) -> EventSet:
    """Incumbent packets pick a band from the profile PMF; center frequencies
    are uniform within the band's feasible range for the incumbent bandwidth
    (a single point when the incumbent occupies the whole band)."""
    if horizon_s <= 0:
        raise ValueError("horizon must be > 0")
    M = num_bands if num_bands is not None else len(profile.band_pmf)
    if len(profile.band_pmf) != M:
        raise ValueError("band_pmf length must equal the number of bands")
    W = band_width_hz if band_width_hz is not None else profile.bandwidth_hz
    if profile.bandwidth_hz > W:
        raise ValueError("incumbent bandwidth exceeds the band width")
    xy = _device_xy(devices)
    n_dev = xy.shape[0]
    if n_dev == 0 or profile.packets_per_hour == 0:
        return EventSet.empty()
    rate = profile.packets_per_hour * horizon_s / SECONDS_PER_HOUR
    counts = rng.poisson(rate, n_dev)
    total_packets = int(counts.sum())
    if total_packets == 0:
        return EventSet.empty()
    dev = np.repeat(np.arange(n_dev), counts)
    arrivals = rng.uniform(0.0, horizon_s, total_packets)
    pkt = np.concatenate([np.arange(1, c + 1) for c in counts])
    pkt_band = rng.choice(M, size=total_packets, p=np.asarray(profile.band_pmf))

    R = profile.repetitions
    T = profile.packet_duration_s
    n_ev = total_packets * R
    rep = np.tile(np.arange(1, R + 1), total_packets)
    ev_dev = np.repeat(dev, R)
    ev_pkt = np.repeat(pkt, R)
    ev_band = np.repeat(pkt_band, R)
    start = np.repeat(arrivals, R) + (rep - 1) * T
    w_i = profile.bandwidth_hz
    f_lo = ev_band * W + w_i / 2.0
    f_hi = (ev_band + 1) * W - w_i / 2.0
    freq = f_lo + (f_hi - f_lo) * rng.random(n_ev)
    return EventSet(
        start=start,
        duration=np.full(n_ev, T),
        freq=freq,
        bandwidth=np.full(n_ev, w_i),
        band=ev_band,
        kind=np.ones(n_ev, dtype=np.int8),
        device=ev_dev,
        packet=ev_pkt,
        rep=rep,
        src_x=xy[ev_dev, 0],
        src_y=xy[ev_dev, 1],
    )


def _overlaps(a: TransmissionEvent, b: TransmissionEvent) -> bool:
    if a.start_s >= b.start_s + b.duration_s or b.start_s >= a.start_s + a.duration_s:
        return False
    return abs(a.center_frequency_hz - b.center_frequency_hz) < 0.5 * (
        a.bandwidth_hz + b.bandwidth_hz
    )


def _same_event(a: TransmissionEvent, b: TransmissionEvent) -> bool:
    return (
        a.source_kind == b.source_kind
        and a.device_id == b.device_id
        and a.packet_index == b.packet_index
        and a.repetition_index == b.repetition_index
    )


def interferers_of(target: TransmissionEvent, all_events) -> list[TransmissionEvent]:
    """Events whose time interval strictly overlaps the target's and whose
    center-frequency gap is strictly below the half-bandwidth sum."""
    return [
        e for e in all_events if not _same_event(e, target) and _overlaps(e, target)
    ]


def sinr_at(
    target: TransmissionEvent,
    receiver: Location,
    interferers: Sequence[TransmissionEvent],
    fading_rng: np.random.Generator,
    channel: ChannelParams,
) -> float:
    """One SINR draw at a receiver with i.i.d. Exp(1) fading per link."""
    d = geometry.distance(target.source_location, receiver)
    if d == 0.0:
        raise ValueError("singular geometry: source coincides with receiver")
    alpha = channel.pathloss_exponent
    h = fading_rng.standard_exponential()
    signal = h * d ** (-alpha)
    interference = 0.0
    for e in interferers:
        dj = geometry.distance(e.source_location, receiver)
        if dj == 0.0:
            raise ValueError("singular geometry: interferer coincides with receiver")
        fj = fading_rng.standard_exponential()
        scale = channel.incumbent_ratio if e.source_kind == "incumbent" else 1.0
        interference += scale * fj * dj ** (-alpha)
    denom = channel.noise_ratio + interference
    if denom == 0.0:
        return math.inf
    return signal / denom


@dataclass(frozen=True)
class Receiver:
    """A listening base station: a location id, the band it is tuned to, and
    whether it counts toward packet decoding (temporary BSs do not)."""

    location_id: int
    location: Location
    band: int
    contributes: bool = True


@dataclass
class Realization:
    """Frozen event stream of one Monte-Carlo iteration.

    Assignment-independent: the SINR of every IoT repetition at a set of
    receiver locations can be computed once and reused for any band
    assignment over those locations.
    """

    region: AreaRegion
    horizon_s: float
    traffic: TrafficProfile
    events: EventSet  # sorted by start time
    target_idx: np.ndarray  # event rows: IoT repetitions of complete packets
    packet_id: np.ndarray  # dense packet id per target
    n_packets: int

    @property
    def n_targets(self) -> int:
        return self.target_idx.shape[0]

    @property
    def target_band(self) -> np.ndarray:
        return self.events.band[self.target_idx]

    @property
    def target_start(self) -> np.ndarray:
        return self.events.start[self.target_idx]

    def sinr_matrix(
        self,
        locations_xy: np.ndarray,
        channel: ChannelParams,
        fading_rng: np.random.Generator,
    ) -> np.ndarray:
        """SINR of every target repetition at every location; (n_targets, K)."""
        ev = self.events
        locations_xy = np.asarray(locations_xy, dtype=float).reshape(-1, 2)
        n_rx = locations_xy.shape[0]
        if self.n_targets == 0 or n_rx == 0:
            return np.zeros((self.n_targets, n_rx))
        dx = ev.src_x[:, None] - locations_xy[None, :, 0]
        dy = ev.src_y[:, None] - locations_xy[None, :, 1]
        d2 = dx * dx + dy * dy
        if np.any(d2 == 0.0):
            raise ValueError("singular geometry: source coincides with receiver")
        dist_pow = d2 ** (-channel.pathloss_exponent / 2.0)
        fading = fading_rng.standard_exponential(d2.shape)
        rel_power = np.where(ev.kind == 1, channel.incumbent_ratio, 1.0)
        interf = interference_matrix(
            ev.start, ev.duration, ev.freq, ev.bandwidth, rel_power,
            self.target_idx, dist_pow, fading,
        )
        signal = fading[self.target_idx] * dist_pow[self.target_idx]
        with np.errstate(divide="ignore"):
            return signal / (channel.noise_ratio + interf)


def simulate_realization(
    region: AreaRegion,
    traffic: TrafficProfile,
    incumbents: Optional[IncumbentProfile],
    iot_density: float,
    inc_density: float,
    horizon_s: float,
    rng: np.random.Generator,
) -> Realization:
    """Sample device populations and generate the full event stream.

    Packets whose repetitions straddle the horizon end are kept as
    interferers but excluded from the decoding targets.
    """
    iot_xy = geometry.sample_hppp_xy(iot_density, region, rng)
    ev_iot = generate_iot_events(traffic, iot_xy, horizon_s, rng)
    parts = [ev_iot]
    if incumbents is not None and inc_density > 0:
        inc_xy = geometry.sample_hppp_xy(inc_density, region, rng)
        parts.append(
            generate_incumbent_events(
                incumbents, inc_xy, horizon_s, rng,
                band_width_hz=traffic.band_width_hz,
                num_bands=traffic.num_bands,
            )
        )
    events = EventSet.concat(parts).sorted_by_start()

    R = traffic.repetitions
    T = traffic.packet_duration_s
    arrival = events.start - (events.rep - 1) * T
    complete = (events.kind == 0) & (arrival + R * T <= horizon_s)
    target_idx = np.flatnonzero(complete)
    key = events.device[target_idx] * np.int64(1 << 32) + events.packet[target_idx]
    _, packet_id = np.unique(key, return_inverse=True)
    n_packets = int(packet_id.max()) + 1 if packet_id.size else 0
    return Realization(
        region=region,
        horizon_s=horizon_s,
        traffic=traffic,
        events=events,
        target_idx=target_idx,
        packet_id=packet_id,
        n_packets=n_packets,
    )


@dataclass
class DecodingLog:
    """Per-location/band decoding counts plus packet-level outcomes."""

    horizon_s: float
    repetitions: int
    receivers: tuple[Receiver, ...]
    observed: dict  # (location_id, band) -> transmitted repetitions on band
    decoded: dict  # (location_id, band) -> decoded repetitions
    joint_decoded: dict  # (id_a, id_b, band), id_a < id_b -> joint count
    joint_observed: dict
    packets_total: int
    packets_decoded: int
    reps_total: int
    reps_decoded: int

    def merge(self, other: "DecodingLog") -> "DecodingLog":
        """Combine counts from two logs (e.g. parallel iterations)."""

        def madd(a: dict, b: dict) -> dict:
            out = dict(a)
            for k, v in b.items():
                out[k] = out.get(k, 0) + v
            return out

        return DecodingLog(
            horizon_s=self.horizon_s + other.horizon_s,
            repetitions=self.repetitions,
            receivers=self.receivers,
            observed=madd(self.observed, other.observed),
            decoded=madd(self.decoded, other.decoded),
            joint_decoded=madd(self.joint_decoded, other.joint_decoded),
            joint_observed=madd(self.joint_observed, other.joint_observed),
            packets_total=self.packets_total + other.packets_total,
            packets_decoded=self.packets_decoded + other.packets_decoded,
            reps_total=self.reps_total + other.reps_total,
            reps_decoded=self.reps_decoded + other.reps_decoded,
        )


def build_decoding_log(
    real: Realization,
    sinr: np.ndarray,
    receivers: Sequence[Receiver],
    tau: float,
    window: Optional[tuple[float, float]] = None,
) -> DecodingLog:
    """Threshold a SINR matrix into a decoding log.

    ``sinr`` columns must correspond to ``receivers`` in order. ``window``
    restricts the log to repetitions starting in [t0, t1) — used to slice a
    training realization into phases. A packet is decoded iff any repetition
    clears the threshold at any contributing receiver tuned to its band.
    """
    if sinr.shape != (real.n_targets, len(receivers)):
        raise ValueError("sinr matrix shape does not match realization/receivers")
    bands = real.target_band
    if window is None:
        in_win = np.ones(real.n_targets, dtype=bool)
    else:
        t0, t1 = window
        starts = real.target_start
        in_win = (starts >= t0) & (starts < t1)

    decoded_mat = sinr > tau  # (n_targets, K)
    band_counts = {
        m: int(np.count_nonzero(in_win & (bands == m)))
        for m in range(real.traffic.num_bands)
    }

    observed: dict = {}
    decoded: dict = {}
    per_rx_dec = []
    for k, rx in enumerate(receivers):
        mask = in_win & (bands == rx.band)
        dec = decoded_mat[:, k] & mask
        per_rx_dec.append(dec)
        key = (rx.location_id, rx.band)
        observed[key] = band_counts[rx.band]
        decoded[key] = int(np.count_nonzero(dec))

    joint_decoded: dict = {}
    joint_observed: dict = {}
    for a in range(len(receivers)):
        for b in range(a + 1, len(receivers)):
            ra, rb = receivers[a], receivers[b]
            if ra.band != rb.band:
                continue
            ka, kb = sorted((ra.location_id, rb.location_id))
            key = (ka, kb, ra.band)
            joint_decoded[key] = int(np.count_nonzero(per_rx_dec[a] & per_rx_dec[b]))
            joint_observed[key] = band_counts[ra.band]

    contributing = [dec for dec, rx in zip(per_rx_dec, receivers) if rx.contributes]
    if contributing:
        rep_dec = np.logical_or.reduce(contributing)
    else:
        rep_dec = np.zeros(real.n_targets, dtype=bool)
    reps_total = int(np.count_nonzero(in_win))
    reps_decoded = int(np.count_nonzero(rep_dec))

    if window is None:
        packets_total = real.n_packets
        if real.n_packets:
            pk_dec = np.zeros(real.n_packets, dtype=bool)
            np.bitwise_or.at(pk_dec, real.packet_id, rep_dec)
            packets_decoded = int(np.count_nonzero(pk_dec))
        else:
            packets_decoded = 0
    else:
        # a window slices packets mid-flight; packet-level stats only make
        # sense for full-horizon logs
        pids = np.unique(real.packet_id[in_win]) if reps_total else np.array([], dtype=int)
        packets_total = int(pids.size)
        if packets_total:
            pk_dec = np.zeros(real.n_packets, dtype=bool)
            np.bitwise_or.at(pk_dec, real.packet_id[in_win], rep_dec[in_win])
            packets_decoded = int(np.count_nonzero(pk_dec[pids]))
        else:
            packets_decoded = 0

    return DecodingLog(
        horizon_s=real.horizon_s if window is None else (window[1] - window[0]),
        repetitions=real.traffic.repetitions,
        receivers=tuple(receivers),
        observed=observed,
        decoded=decoded,
        joint_decoded=joint_decoded,
        joint_observed=joint_observed,
        packets_total=packets_total,
        packets_decoded=packets_decoded,
        reps_total=reps_total,
        reps_decoded=reps_decoded,
    )


def receivers_from_assignment(
    layout: NetworkLayout,
    assignment,
    temporary_bands: Optional[Sequence[int]] = None,
) -> list[Receiver]:
    """Receivers implied by an assignment matrix over installed+candidate rows
    plus optional bands for the layout's temporary stations."""
    locs = layout.all_locations()
    B, C = layout.num_installed, layout.num_candidates
    X = np.asarray(assignment.X)
    if X.shape[0] != B + C:
        raise ValueError("assignment rows do not match layout installed+candidates")
    receivers = []
    for b in range(B + C):
        row = np.flatnonzero(X[b])
        if row.size == 1:
            receivers.append(Receiver(b, locs[b], int(row[0]), contributes=True))
        elif row.size > 1:
            raise ValueError("assignment row has more than one band")
    if temporary_bands is not None:
        if len(temporary_bands) != layout.num_temporary:
            raise ValueError("temporary_bands length mismatch")
        for t, m in enumerate(temporary_bands):
            lid = B + C + t
            receivers.append(Receiver(lid, locs[lid], int(m), contributes=False))
    return receivers


def run_simulation(
    layout: NetworkLayout,
    assignment,
    traffic: TrafficProfile,
    incumbents: Optional[IncumbentProfile],
    channel: ChannelParams,
    iot_density: float,
    inc_density: float,
    horizon_s: float,
    rng: np.random.Generator,
    temporary_bands: Optional[Sequence[int]] = None,
) -> DecodingLog:
    """End-to-end simulation of one deployment under one assignment."""
    assignment.validate()
    receivers = receivers_from_assignment(layout, assignment, temporary_bands)
    fading_rng = rng.spawn(1)[0]
    real = simulate_realization(
        layout.region, traffic, incumbents, iot_density, inc_density, horizon_s, rng
    )
    xy = np.array([[r.location.x, r.location.y] for r in receivers]).reshape(-1, 2)
    sinr = real.sinr_matrix(xy, channel, fading_rng)
    return build_decoding_log(real, sinr, receivers, channel.decode_threshold)


def save_log_csv(log: DecodingLog, marginal_path, joint_path) -> None:
    """Write the documented CSV pair: (location_id, band, observed, decoded)
    and (loc_a, loc_b, band, joint_decoded, observed)."""
    with open(marginal_path, "w", newline="") as f:
        wr = csv.writer(f)
        wr.writerow(["location_id", "band", "observed", "decoded"])
        for (lid, m) in sorted(log.observed):
            wr.writerow([lid, m, log.observed[(lid, m)], log.decoded.get((lid, m), 0)])
    with open(joint_path, "w", newline="") as f:
        wr = csv.writer(f)
        wr.writerow(["loc_a", "loc_b", "band", "joint_decoded", "observed"])
        for (a, b, m) in sorted(log.joint_decoded):
            wr.writerow([a, b, m, log.joint_decoded[(a, b, m)], log.joint_observed[(a, b, m)]])
