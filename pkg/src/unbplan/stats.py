"""Empirical decoding-probability estimates from decoding logs.

Denominators are transmitted repetition counts on a band (the infrastructure
is assumed to know packet and repetition numbering), so a station that hears
nothing still accumulates observations.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Iterable

from unbplan.traffic import DecodingLog

__all__ = [
    "PairwiseStats",
    "empirical_adp",
    "empirical_jdp",
    "empirical_pdp",
    "empirical_tdp",
]


class InsufficientDataError(ValueError):
    pass


def empirical_adp(log: DecodingLog, location_id: int, band: int) -> float:
    """Fraction of transmitted repetitions on the band decoded at the location."""
    key = (location_id, band)
    obs = log.observed.get(key, 0)
    if obs <= 0:
        raise InsufficientDataError(
            f"insufficient data: no observations for location {location_id} band {band}"
        )
    return log.decoded.get(key, 0) / obs


def empirical_jdp(log: DecodingLog, loc_a: int, loc_b: int, band: int) -> float:
    """Fraction of repetitions decoded at both locations on the band."""
    if loc_a == loc_b:
        return empirical_adp(log, loc_a, band)
    a, b = sorted((loc_a, loc_b))
    key = (a, b, band)
    obs = log.joint_observed.get(key, 0)
    if obs <= 0:
        raise InsufficientDataError(
            f"insufficient data: pair ({a}, {b}) never co-listened on band {band}"
        )
    return log.joint_decoded.get(key, 0) / obs


def empirical_pdp(log: DecodingLog) -> float:
    if log.packets_total <= 0:
        raise InsufficientDataError("insufficient data: empty log (no complete packets)")
    return log.packets_decoded / log.packets_total


def empirical_tdp(log: DecodingLog) -> float:
    if log.reps_total <= 0:
        raise InsufficientDataError("insufficient data: empty log (no repetitions)")
    return log.reps_decoded / log.reps_total


@dataclass
class PairwiseStats:
    """Aggregated ADP/JDP counts across one or more logs.

    Keys mirror the logs: ``adp[(location_id, band)]`` and
    ``jdp[(loc_a, loc_b, band)]`` with loc_a < loc_b; values are
    (decoded, observed) count pairs, so merging logs is count addition.
    """

    adp: dict = field(default_factory=dict)
    jdp: dict = field(default_factory=dict)

    @classmethod
    def from_logs(cls, logs: Iterable[DecodingLog]) -> "PairwiseStats":
        st = cls()
        for log in logs:
            st.add_log(log)
        return st

    def add_log(self, log: DecodingLog) -> None:
        for key, obs in log.observed.items():
            dec = log.decoded.get(key, 0)
            d0, o0 = self.adp.get(key, (0, 0))
            self.adp[key] = (d0 + dec, o0 + obs)
        for key, dec in log.joint_decoded.items():
            obs = log.joint_observed.get(key, 0)
            d0, o0 = self.jdp.get(key, (0, 0))
            self.jdp[key] = (d0 + dec, o0 + obs)

    def has_adp(self, location_id: int, band: int) -> bool:
        return self.adp.get((location_id, band), (0, 0))[1] > 0

    def has_jdp(self, loc_a: int, loc_b: int, band: int) -> bool:
        a, b = sorted((loc_a, loc_b))
        return self.jdp.get((a, b, band), (0, 0))[1] > 0

    def adp_estimate(self, location_id: int, band: int) -> float:
        dec, obs = self.adp.get((location_id, band), (0, 0))
        if obs <= 0:
            raise InsufficientDataError(
                f"insufficient data for ADP ({location_id}, {band})"
            )
        return dec / obs

    def jdp_estimate(self, loc_a: int, loc_b: int, band: int) -> float:
        if loc_a == loc_b:
            return self.adp_estimate(loc_a, band)
        a, b = sorted((loc_a, loc_b))
        dec, obs = self.jdp.get((a, b, band), (0, 0))
        if obs <= 0:
            raise InsufficientDataError(
                f"insufficient data for JDP ({a}, {b}, {band})"
            )
        return dec / obs

    def jdp_weight(self, loc_a: int, loc_b: int, band: int) -> int:
        a, b = sorted((loc_a, loc_b))
        return self.jdp.get((a, b, band), (0, 0))[1]

    def save_csv(self, path) -> None:
        """One CSV, ``record`` column distinguishing adp and jdp rows."""
        with open(path, "w", newline="") as f:
            wr = csv.writer(f)
            wr.writerow(["record", "loc_a", "loc_b", "band", "decoded", "observed"])
            for (lid, m) in sorted(self.adp):
                dec, obs = self.adp[(lid, m)]
                wr.writerow(["adp", lid, "", m, dec, obs])
            for (a, b, m) in sorted(self.jdp):
                dec, obs = self.jdp[(a, b, m)]
                wr.writerow(["jdp", a, b, m, dec, obs])

    @classmethod
    def load_csv(cls, path) -> "PairwiseStats":
        st = cls()
        with open(path, newline="") as f:
            for row in csv.DictReader(f):
                dec, obs = int(row["decoded"]), int(row["observed"])
                if row["record"] == "adp":
                    key = (int(row["loc_a"]), int(row["band"]))
                    d0, o0 = st.adp.get(key, (0, 0))
                    st.adp[key] = (d0 + dec, o0 + obs)
                elif row["record"] == "jdp":
                    key = (int(row["loc_a"]), int(row["loc_b"]), int(row["band"]))
                    d0, o0 = st.jdp.get(key, (0, 0))
                    st.jdp[key] = (d0 + dec, o0 + obs)
                else:
                    raise ValueError(f"unknown record kind {row['record']!r}")
        return st
