"""Experiment configuration: YAML with explicit units, converted to the
linear SI quantities the rest of the package works in (watts, per-square-
meter densities, linear SINR thresholds)."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import yaml

from unbplan import geometry
from unbplan.geometry import AreaRegion, Disk
from unbplan.traffic import ChannelParams, IncumbentProfile, TrafficProfile

__all__ = ["ExperimentConfig", "dbm_to_watts", "db_to_linear"]


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) / 1000.0


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass
class ExperimentConfig:
    """All experiment knobs, in the units the config file declares.

    Field-name suffixes carry the units; loaders reject unknown keys so
    typos fail loudly instead of silently taking defaults.
    """

    # traffic (per device)
    packets_per_hour: float = 3.0
    repetitions: int = 3
    payload_bits: int = 160
    signal_bandwidth_hz: float = 600.0
    packet_duration_s: Optional[float] = None  # defaults to payload_bits / bandwidth

    # incumbents
    incumbent_packets_per_hour: float = 3.0
    incumbent_repetitions: int = 1
    incumbent_payload_bits: int = 1600
    incumbent_bandwidth_hz: float = 200_000.0
    incumbent_packet_duration_s: Optional[float] = None

    # spectrum
    num_bands: int = 3
    band_width_hz: float = 200_000.0

    # radio
    tx_power_dbm: float = 14.0
    incumbent_power_dbm: float = 14.0
    noise_power_dbm: float = -146.0
    pathloss_exponent: float = 4.0
    tau_db: float = 10.0

    # population
    density_iot_per_km2: float = 50.0
    density_incumbent_per_km2: float = 50.0

    # region and infrastructure
    region_type: str = "disk"
    region_radius_km: float = 10.0
    region_vertices_km: Optional[list] = None
    num_installed: int = 6
    num_candidates: int = 0
    num_new: int = 0  # stations to place among the candidates
    num_temporary: int = 0

    # training / optimization / harness
    train_minutes: float = 10.0
    train_demand_per_band: int = 10
    solver_time_limit_s: float = 10.0
    eval_hours: float = 1.0
    mc_iters: int = 100
    seed: int = 0

    def __post_init__(self) -> None:
        if self.packet_duration_s is None:
            self.packet_duration_s = self.payload_bits / self.signal_bandwidth_hz
        if self.incumbent_packet_duration_s is None:
            self.incumbent_packet_duration_s = (
                self.incumbent_payload_bits / self.incumbent_bandwidth_hz
            )
        self._validate()

    def _validate(self) -> None:
        positive = {
            "signal_bandwidth_hz": self.signal_bandwidth_hz,
            "band_width_hz": self.band_width_hz,
            "num_bands": self.num_bands,
            "packet_duration_s": self.packet_duration_s,
            "train_minutes": self.train_minutes,
            "eval_hours": self.eval_hours,
            "mc_iters": self.mc_iters,
        }
        for name, val in positive.items():
            if val <= 0:
                raise ValueError(f"{name} must be > 0 (got {val})")
        nonneg = {
            "packets_per_hour": self.packets_per_hour,
            "incumbent_packets_per_hour": self.incumbent_packets_per_hour,
            "density_iot_per_km2": self.density_iot_per_km2,
            "density_incumbent_per_km2": self.density_incumbent_per_km2,
            "num_candidates": self.num_candidates,
            "num_new": self.num_new,
            "num_temporary": self.num_temporary,
        }
        for name, val in nonneg.items():
            if val < 0:
                raise ValueError(f"{name} must be >= 0 (got {val})")
        if self.pathloss_exponent <= 2:
            raise ValueError("pathloss_exponent must be > 2")
        if self.num_installed < 1:
            raise ValueError("num_installed must be >= 1")
        if self.num_new > self.num_candidates:
            raise ValueError("num_new exceeds num_candidates")
        if self.region_type not in ("disk", "polygon"):
            raise ValueError(f"unknown region_type {self.region_type!r}")
        if self.region_type == "polygon" and not self.region_vertices_km:
            raise ValueError("polygon region requires region_vertices_km")

    # -- loading -----------------------------------------------------------

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as f:
            doc = yaml.safe_load(f) or {}
        return cls.from_dict(doc)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**doc)

    def save(self, path) -> None:
        with open(path, "w") as f:
            yaml.safe_dump(dataclasses.asdict(self), f, sort_keys=False)

    def replace(self, **kw) -> "ExperimentConfig":
        return dataclasses.replace(self, **kw)

    # -- derived linear/SI quantities --------------------------------------

    @property
    def tx_power_w(self) -> float:
        return dbm_to_watts(self.tx_power_dbm)

    @property
    def tau(self) -> float:
        return db_to_linear(self.tau_db)

    @property
    def density_iot_per_m2(self) -> float:
        return self.density_iot_per_km2 / 1e6

    @property
    def density_incumbent_per_m2(self) -> float:
        return self.density_incumbent_per_km2 / 1e6

    @property
    def train_seconds(self) -> float:
        return self.train_minutes * 60.0

    @property
    def eval_seconds(self) -> float:
        return self.eval_hours * 3600.0

    def region(self) -> AreaRegion:
        if self.region_type == "disk":
            return Disk(self.region_radius_km * 1000.0)
        verts = tuple((x * 1000.0, y * 1000.0) for x, y in self.region_vertices_km)
        return geometry.Polygon(verts)

    def traffic_profile(self) -> TrafficProfile:
        return TrafficProfile(
            packets_per_hour=self.packets_per_hour,
            repetitions=self.repetitions,
            packet_duration_s=float(self.packet_duration_s),
            signal_bandwidth_hz=self.signal_bandwidth_hz,
            num_bands=self.num_bands,
            band_width_hz=self.band_width_hz,
            tx_power_w=self.tx_power_w,
        )

    def incumbent_profile(self, band_pmf: Sequence[float]) -> IncumbentProfile:
        return IncumbentProfile(
            packets_per_hour=self.incumbent_packets_per_hour,
            repetitions=self.incumbent_repetitions,
            packet_duration_s=float(self.incumbent_packet_duration_s),
            bandwidth_hz=self.incumbent_bandwidth_hz,
            band_pmf=tuple(float(p) for p in band_pmf),
            tx_power_w=dbm_to_watts(self.incumbent_power_dbm),
        )

    def channel_params(self) -> ChannelParams:
        p = self.tx_power_w
        return ChannelParams(
            pathloss_exponent=self.pathloss_exponent,
            noise_ratio=dbm_to_watts(self.noise_power_dbm) / p,
            incumbent_ratio=dbm_to_watts(self.incumbent_power_dbm) / p,
            decode_threshold=self.tau,
        )

    def device_counts(self) -> tuple[int, int]:
        """IoT and incumbent population sizes implied by the densities."""
        area = geometry.area_of(self.region())
        return (
            int(round(self.density_iot_per_m2 * area)),
            int(round(self.density_incumbent_per_m2 * area)),
        )
