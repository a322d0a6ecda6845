"""Training-phase scheduling: choose a short sequence of band assignments
whose joint observations cover the statistics the fitter needs.

Two coverage modes share one greedy machinery. In model-driven training the
target is a per-band quota of distinct pairwise (joint-decoding) keys; in
measurement-driven training the target is the full universe of per-station
and pairwise keys. Both reduce to partitioned set cover with capped marginal
gains, solved greedily with lowest-index tie-breaking.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
import yaml

from unbplan.optimizer import AssignmentMatrix

__all__ = [
    "ViableAssignmentSet",
    "MeasurableSet",
    "CoverageTarget",
    "TrainingPlan",
    "enumerate_viable",
    "measurable_set",
    "greedy_cover",
    "schedule",
]


class CoverageError(ValueError):
    pass


@dataclass
class ViableAssignmentSet:
    """Candidate training assignments over B installed + B_hat temporary
    stations; every row holds exactly one band and each band is used by at
    least ``floor`` installed stations."""

    assignments: list[AssignmentMatrix]
    location_ids: tuple[int, ...]  # row index -> location id
    num_installed: int
    floor: int

    def __len__(self) -> int:
        return len(self.assignments)

    def __getitem__(self, i: int) -> AssignmentMatrix:
        return self.assignments[i]


def _floor_ok(bands: Sequence[int], B: int, M: int, floor: int) -> bool:
    if floor == 0:
        return True
    counts = np.bincount(np.asarray(bands[:B]), minlength=M)
    return bool((counts >= floor).all())


def enumerate_viable(
    B: int,
    B_hat: int,
    M: int,
    floor: int,
    cap: int = 100_000,
    rng: Optional[np.random.Generator] = None,
    location_ids: Optional[Sequence[int]] = None,
    predicate: Optional[Callable[[AssignmentMatrix], bool]] = None,
) -> ViableAssignmentSet:
    """All band assignments of installed + temporary stations meeting the
    per-band installed floor, subsampled uniformly to ``cap`` when the full
    product is larger. An optional predicate filters further (for example a
    predicted-throughput threshold)."""
    if floor * M > B:
        raise ValueError(f"infeasible floor: {floor} * {M} bands > {B} installed stations")
    if location_ids is None:
        location_ids = tuple(range(B + B_hat))
    location_ids = tuple(location_ids)
    if len(location_ids) != B + B_hat:
        raise ValueError("location_ids must have one entry per station row")

    n_rows = B + B_hat
    total = M**n_rows

    def build(bands):
        return AssignmentMatrix.from_bands(
            bands, num_installed=n_rows, num_candidates=0, delta_b=0, num_bands=M
        )

    out: list[AssignmentMatrix] = []
    if total <= cap:
        for bands in itertools.product(range(M), repeat=n_rows):
            if not _floor_ok(bands, B, M, floor):
                continue
            a = build(bands)
            if predicate is None or predicate(a):
                out.append(a)
    else:
        if rng is None:
            raise ValueError(f"enumeration of {total} assignments exceeds cap {cap}; pass rng to subsample")
        seen = set()
        rounds = 0
        while len(out) < cap and rounds < 200:
            rounds += 1
            batch = rng.integers(0, M, size=(4 * cap, n_rows))
            if floor > 0:
                counts = np.stack([(batch[:, :B] == m).sum(axis=1) for m in range(M)], axis=1)
                batch = batch[(counts >= floor).all(axis=1)]
            for row in batch:
                bands = tuple(int(v) for v in row)
                if bands in seen:
                    continue
                seen.add(bands)
                a = build(bands)
                if predicate is None or predicate(a):
                    out.append(a)
                    if len(out) >= cap:
                        break
    return ViableAssignmentSet(
        assignments=out, location_ids=location_ids, num_installed=B, floor=floor
    )


@dataclass(frozen=True)
class MeasurableSet:
    """Statistics observable under one training assignment: pairwise keys
    (loc_a, loc_b, band) for every co-band station pair, plus per-station
    keys (loc, band) in measurement mode."""

    jdp_keys: frozenset
    adp_keys: frozenset = frozenset()

    @property
    def all_keys(self) -> frozenset:
        return self.jdp_keys | self.adp_keys


def measurable_set(
    assignment: AssignmentMatrix,
    location_ids: Sequence[int],
    mode: str = "MOD",
) -> MeasurableSet:
    if mode not in ("MOD", "MEAS"):
        raise ValueError(f"unknown mode {mode!r}")
    M = assignment.num_bands
    jdp, adp = set(), set()
    for m in range(M):
        rows = np.flatnonzero(assignment.X[:, m])
        locs = sorted(location_ids[r] for r in rows)
        for a, b in itertools.combinations(locs, 2):
            jdp.add((a, b, m))
        if mode == "MEAS":
            for lid in locs:
                adp.add((lid, m))
    return MeasurableSet(jdp_keys=frozenset(jdp), adp_keys=frozenset(adp))


@dataclass
class CoverageTarget:
    """Per-partition key universes and how many distinct keys each needs.

    Partitions are keyed by band for pairwise quotas; measurement mode uses
    one partition holding the complete key universe with a demand equal to
    its size (full cover).
    """

    partitions: dict = field(default_factory=dict)  # label -> frozenset of keys
    demands: dict = field(default_factory=dict)  # label -> int

    def __post_init__(self) -> None:
        for label, need in self.demands.items():
            avail = len(self.partitions.get(label, ()))
            if need > avail:
                raise ValueError(
                    f"demand {need} for partition {label!r} exceeds its {avail} reachable keys"
                )

    @classmethod
    def for_mod(
        cls,
        sets: Sequence[MeasurableSet],
        num_bands: int,
        demand_per_band,
    ) -> "CoverageTarget":
        """Band-partitioned pairwise quotas, pruned to reachable keys."""
        reachable: dict[int, set] = {m: set() for m in range(num_bands)}
        for s in sets:
            for key in s.jdp_keys:
                reachable[key[2]].add(key)
        if np.isscalar(demand_per_band):
            demand_per_band = [int(demand_per_band)] * num_bands
        partitions = {m: frozenset(reachable[m]) for m in range(num_bands)}
        demands = {
            m: min(int(demand_per_band[m]), len(partitions[m])) for m in range(num_bands)
        }
        return cls(partitions=partitions, demands=demands)

    @classmethod
    def for_meas(cls, sets: Sequence[MeasurableSet]) -> "CoverageTarget":
        """Single partition demanding every reachable key."""
        universe = frozenset().union(*(s.all_keys for s in sets)) if sets else frozenset()
        return cls(partitions={"all": universe}, demands={"all": len(universe)})


@dataclass
class TrainingPlan:
    chosen: list[int]  # indices into the viable assignment set
    covered: frozenset

    def __len__(self) -> int:
        return len(self.chosen)

    def save(self, path, viable: ViableAssignmentSet, T_train_s: float) -> None:
        doc = {
            "phases": [
                {
                    "assignment_index": int(i),
                    "bands": [viable[i].band_of(r) for r in range(len(viable.location_ids))],
                    "location_ids": list(viable.location_ids),
                    "start_s": float(start),
                    "duration_s": float(dur),
                }
                for (i, start, dur) in _phase_tuples(self, T_train_s)
            ]
        }
        with open(path, "w") as f:
            yaml.safe_dump(doc, f, sort_keys=False)


def greedy_cover(
    target: CoverageTarget, sets: Sequence[MeasurableSet]
) -> TrainingPlan:
    """Pick assignments by maximum marginal demand reduction until every
    partition quota is met; never picks a zero-gain set; ties go to the
    lowest index."""
    key_partition = {}
    for label, keys in target.partitions.items():
        for k in keys:
            key_partition[k] = label
    residual = dict(target.demands)
    covered: set = set()
    chosen: list[int] = []
    remaining = set(range(len(sets)))

    while any(v > 0 for v in residual.values()):
        best_i, best_gain = None, 0
        for i in sorted(remaining):
            per_label: dict = {}
            for k in sets[i].all_keys:
                if k in covered:
                    continue
                label = key_partition.get(k)
                if label is not None and residual.get(label, 0) > 0:
                    per_label[label] = per_label.get(label, 0) + 1
            gain = sum(min(c, residual[label]) for label, c in per_label.items())
            if gain > best_gain:
                best_i, best_gain = i, gain
        if best_i is None:
            shortfall = {
                label: need
                for label, need in residual.items()
                if need > 0
            }
            missing = sorted(
                k
                for label, keys in target.partitions.items()
                if residual.get(label, 0) > 0
                for k in keys
                if k not in covered
            )
            raise CoverageError(
                f"coverage demands unreachable: residual {shortfall}, uncovered keys {missing}"
            )
        for k in sets[best_i].all_keys:
            if k in covered:
                continue
            label = key_partition.get(k)
            if label is not None and residual.get(label, 0) > 0:
                residual[label] -= 1
            covered.add(k)
        chosen.append(best_i)
        remaining.discard(best_i)
    return TrainingPlan(chosen=chosen, covered=frozenset(covered))


def _phase_tuples(plan: TrainingPlan, T_train_s: float):
    dur = T_train_s / len(plan.chosen)
    return [(i, k * dur, dur) for k, i in enumerate(plan.chosen)]


def schedule(
    plan: TrainingPlan, viable: ViableAssignmentSet, T_train_s: float
) -> list[tuple[AssignmentMatrix, float, float]]:
    """Contiguous equal-duration phases, one per chosen assignment."""
    if not plan.chosen:
        raise ValueError("cannot schedule an empty plan")
    if T_train_s <= 0:
        raise ValueError("training duration must be > 0")
    return [(viable[i], start, dur) for (i, start, dur) in _phase_tuples(plan, T_train_s)]
