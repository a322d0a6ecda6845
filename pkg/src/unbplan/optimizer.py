"""Base-station placement and band-assignment optimization.

The relaxed objective is linear in per-station decoding probabilities minus
pairwise joint-decoding corrections. Binary products are linearized exactly
with auxiliary pair variables (only the binding inequality per coefficient
sign), and the resulting integer linear program is solved with HiGHS
branch-and-bound under a CPU time limit. A brute-force enumerator serves as
the exactness oracle on small instances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

__all__ = [
    "AssignmentMatrix",
    "ObjectiveCoefficients",
    "SolveResult",
    "objective_value",
    "solve_p3",
    "brute_force_p3",
    "random_assignment",
    "max_separation_assignment",
    "sampled_coefficient_blocks",
]


class SolverError(RuntimeError):
    pass


@dataclass
class AssignmentMatrix:
    """Binary (B+C) x M matrix: installed rows keep exactly one band,
    exactly ``delta_b`` candidate rows get a band."""

    X: np.ndarray
    num_installed: int
    num_candidates: int
    delta_b: int

    def __post_init__(self) -> None:
        self.X = np.asarray(self.X, dtype=np.int8)

    @property
    def num_bands(self) -> int:
        return self.X.shape[1]

    def validate(self) -> None:
        B, C = self.num_installed, self.num_candidates
        X = self.X
        if X.shape[0] != B + C:
            raise ValueError("assignment matrix has wrong number of rows")
        if not np.isin(X, (0, 1)).all():
            raise ValueError("assignment entries must be binary")
        row = X.sum(axis=1)
        if B and not (row[:B] == 1).all():
            raise ValueError("every installed station must keep exactly one band")
        if C and not (row[B:] <= 1).all():
            raise ValueError("candidate rows may hold at most one station")
        if int(row[B:].sum()) != self.delta_b:
            raise ValueError(
                f"expected {self.delta_b} placed stations, found {int(row[B:].sum())}"
            )

    def band_of(self, row: int) -> Optional[int]:
        nz = np.flatnonzero(self.X[row])
        return int(nz[0]) if nz.size else None

    @classmethod
    def from_bands(cls, bands, num_installed: int, num_candidates: int = 0,
                   delta_b: int = 0, num_bands: Optional[int] = None) -> "AssignmentMatrix":
        """Build from a per-row band vector; use ``None`` for empty rows."""
        bands = list(bands)
        M = num_bands if num_bands is not None else (max(b for b in bands if b is not None) + 1)
        X = np.zeros((len(bands), M), dtype=np.int8)
        for i, b in enumerate(bands):
            if b is not None:
                X[i, b] = 1
        return cls(X=X, num_installed=num_installed, num_candidates=num_candidates,
                   delta_b=delta_b)


@dataclass
class ObjectiveCoefficients:
    """linear[b, m]: per-station decoding probability; quadratic[b, v, m]:
    pairwise joint term, stored symmetrically with a zero diagonal."""

    linear: np.ndarray
    quadratic: np.ndarray

    def __post_init__(self) -> None:
        self.linear = np.asarray(self.linear, dtype=float)
        self.quadratic = np.asarray(self.quadratic, dtype=float)
        L, M = self.linear.shape
        if self.quadratic.shape != (L, L, M):
            raise ValueError("quadratic coefficients must be (L, L, M)")
        if not np.allclose(self.quadratic, self.quadratic.transpose(1, 0, 2)):
            raise ValueError("quadratic coefficients must be symmetric in (b, v)")

    @property
    def num_locations(self) -> int:
        return self.linear.shape[0]

    @property
    def num_bands(self) -> int:
        return self.linear.shape[1]

    def validate_probabilities(self) -> None:
        if ((self.linear < 0) | (self.linear > 1)).any():
            raise ValueError("linear coefficients must be probabilities")
        if ((self.quadratic < 0) | (self.quadratic > 1)).any():
            raise ValueError("quadratic coefficients must be probabilities")


def objective_value(assignment, coeffs: ObjectiveCoefficients) -> float:
    """Sum over bands of linear terms minus pairwise joint corrections."""
    X = assignment.X if isinstance(assignment, AssignmentMatrix) else np.asarray(assignment)
    if X.shape != (coeffs.num_locations, coeffs.num_bands):
        raise ValueError("assignment shape does not match coefficients")
    total = 0.0
    for m in range(coeffs.num_bands):
        v = X[:, m].astype(float)
        total += v @ coeffs.linear[:, m]
        total -= 0.5 * v @ coeffs.quadratic[:, :, m] @ v
    return float(total)


@dataclass
class SolveResult:
    assignment: AssignmentMatrix
    objective: float
    time_limited: bool


def _solve_milp(
    coeffs: ObjectiveCoefficients,
    B: int,
    C: int,
    M: int,
    delta_b: int,
    time_limit_s: float,
    installed_band_floor: int = 0,
) -> SolveResult:
    if delta_b > C:
        raise ValueError("infeasible counts: delta_b exceeds candidate locations")
    L = B + C
    nx = L * M

    def xvar(b, m):
        return b * M + m

    pair_vars = []  # (b, v, m, coefficient)
    for m in range(M):
        for b in range(L):
            for v in range(b + 1, L):
                q = coeffs.quadratic[b, v, m]
                if q != 0.0:
                    pair_vars.append((b, v, m, q))
    ny = len(pair_vars)
    n = nx + ny

    cost = np.zeros(n)
    cost[:nx] = -coeffs.linear.reshape(L * M)
    for i, (_, _, _, q) in enumerate(pair_vars):
        cost[nx + i] = q

    rows, cols, vals, lb, ub = [], [], [], [], []
    r = 0
    for b in range(B):  # installed: exactly one band
        for m in range(M):
            rows.append(r); cols.append(xvar(b, m)); vals.append(1.0)
        lb.append(1.0); ub.append(1.0); r += 1
    for b in range(B, L):  # candidates: at most one band
        for m in range(M):
            rows.append(r); cols.append(xvar(b, m)); vals.append(1.0)
        lb.append(0.0); ub.append(1.0); r += 1
    if C:
        for b in range(B, L):  # total placed candidates
            for m in range(M):
                rows.append(r); cols.append(xvar(b, m)); vals.append(1.0)
        lb.append(float(delta_b)); ub.append(float(delta_b)); r += 1
    elif delta_b != 0:
        raise ValueError("infeasible counts: delta_b > 0 with no candidates")
    if installed_band_floor > 0:
        for m in range(M):  # every band covered by enough installed stations
            for b in range(B):
                rows.append(r); cols.append(xvar(b, m)); vals.append(1.0)
            lb.append(float(installed_band_floor)); ub.append(np.inf); r += 1
    for i, (b, v, m, q) in enumerate(pair_vars):
        if q > 0:  # y pushed down: enforce y >= x_b + x_v - 1
            rows += [r, r, r]
            cols += [xvar(b, m), xvar(v, m), nx + i]
            vals += [1.0, 1.0, -1.0]
            lb.append(-np.inf); ub.append(1.0); r += 1
        else:  # y pushed up: enforce y <= x_b and y <= x_v
            rows += [r, r]; cols += [nx + i, xvar(b, m)]; vals += [1.0, -1.0]
            lb.append(-np.inf); ub.append(0.0); r += 1
            rows += [r, r]; cols += [nx + i, xvar(v, m)]; vals += [1.0, -1.0]
            lb.append(-np.inf); ub.append(0.0); r += 1

    A = sparse.csr_matrix((vals, (rows, cols)), shape=(r, n))
    integrality = np.zeros(n)
    integrality[:nx] = 1  # pair variables relax to continuous at binary x
    res = milp(
        c=cost,
        constraints=LinearConstraint(A, np.array(lb), np.array(ub)),
        integrality=integrality,
        bounds=Bounds(0.0, 1.0),
        options={"time_limit": float(time_limit_s)},
    )
    if res.x is None:
        raise SolverError(f"no incumbent solution found (status {res.status}: {res.message})")
    X = np.rint(res.x[:nx]).astype(np.int8).reshape(L, M)
    assignment = AssignmentMatrix(X=X, num_installed=B, num_candidates=C, delta_b=delta_b)
    assignment.validate()
    return SolveResult(
        assignment=assignment,
        objective=objective_value(assignment, coeffs),
        time_limited=(res.status == 1),
    )


ENUM_CAP = 700_000  # base assignments a vectorized scan handles in well under a second


def _base_assignments(B: int, M: int) -> np.ndarray:
    """All M^B band vectors over installed stations, lexicographic order."""
    n = M**B
    out = np.empty((n, B), dtype=np.int8)
    for b in range(B):
        block = M ** (B - 1 - b)
        out[:, b] = np.tile(np.repeat(np.arange(M, dtype=np.int8), block), n // (block * M))
    return out


def _enumerate_p3(
    coeffs: ObjectiveCoefficients,
    B: int,
    C: int,
    M: int,
    delta_b: int,
    installed_band_floor: int = 0,
) -> SolveResult:
    """Exact optimum by vectorized exhaustive scoring (delta_b <= 1 only)."""
    if delta_b > 1:
        raise ValueError("enumeration path handles delta_b <= 1")
    S = _base_assignments(B, M)
    if installed_band_floor > 0:
        counts = np.stack([(S == m).sum(axis=1) for m in range(M)], axis=1)
        S = S[(counts >= installed_band_floor).all(axis=1)]
        if S.shape[0] == 0:
            raise SolverError("no assignment satisfies the per-band floor")
    lin, quad = coeffs.linear, coeffs.quadratic

    best_val = -np.inf
    best_bands: Optional[np.ndarray] = None
    best_extra: Optional[tuple[int, int]] = None
    chunk = 65536
    for c0 in range(0, S.shape[0], chunk):
        Sc = S[c0 : c0 + chunk]
        n = Sc.shape[0]
        val = np.zeros(n)
        extra = np.full((n, C, M), -np.inf) if delta_b == 1 else None
        for m in range(M):
            mask = (Sc == m).astype(float)
            val += mask @ lin[:B, m]
            val -= 0.5 * np.einsum("nb,bv,nv->n", mask, quad[:B, :B, m], mask)
            if delta_b == 1:
                # marginal value of opening each candidate on band m
                extra[:, :, m] = lin[B:, m][None, :] - mask @ quad[:B, B:, m]
        if delta_b == 1:
            flat = extra.reshape(n, C * M)
            pick = np.argmax(flat, axis=1)
            val = val + flat[np.arange(n), pick]
        i = int(np.argmax(val))
        if val[i] > best_val:
            best_val = float(val[i])
            best_bands = Sc[i].copy()
            if delta_b == 1:
                best_extra = (int(pick[i]) // M, int(pick[i]) % M)

    assert best_bands is not None
    X = np.zeros((B + C, M), dtype=np.int8)
    X[np.arange(B), best_bands] = 1
    if delta_b == 1:
        c, m = best_extra
        X[B + c, m] = 1
    assignment = AssignmentMatrix(X=X, num_installed=B, num_candidates=C, delta_b=delta_b)
    assignment.validate()
    return SolveResult(
        assignment=assignment,
        objective=objective_value(assignment, coeffs),
        time_limited=False,
    )


def solve_p3(
    coeffs: ObjectiveCoefficients,
    B: int,
    C: int,
    M: int,
    delta_b: int,
    time_limit_s: float = 10.0,
    method: str = "auto",
) -> SolveResult:
    """Maximize the relaxed decoding objective over feasible assignments.

    ``auto`` scans all assignments when the space is small enough (exact,
    fast at planning scale) and otherwise falls back to branch-and-bound,
    which is exact unless it runs into the time limit (``time_limited``).
    """
    if coeffs.linear.shape != (B + C, M):
        raise ValueError("coefficient shape does not match (B+C, M)")
    if delta_b > C:
        raise ValueError("infeasible counts: delta_b exceeds candidate locations")
    if method == "auto":
        enumerable = M**B <= ENUM_CAP and delta_b <= 1 and (delta_b == 0 or C > 0)
        method = "enumerate" if enumerable else "milp"
    if method == "enumerate":
        return _enumerate_p3(coeffs, B, C, M, delta_b)
    if method == "milp":
        return _solve_milp(coeffs, B, C, M, delta_b, time_limit_s)
    raise ValueError(f"unknown method {method!r}")


def brute_force_p3(
    coeffs: ObjectiveCoefficients,
    B: int,
    C: int,
    M: int,
    delta_b: int,
    max_enumeration: int = 10_000_000,
) -> SolveResult:
    """Global optimum by exhaustive search; ties broken by the
    lexicographically smallest flattened assignment."""
    if delta_b > C:
        raise ValueError("infeasible counts: delta_b exceeds candidate locations")
    from math import comb

    size = comb(C, delta_b) * M ** (B + delta_b)
    if size > max_enumeration:
        raise ValueError(f"enumeration size {size} exceeds cap {max_enumeration}")
    L = B + C
    best = None
    for chosen in itertools.combinations(range(C), delta_b):
        for inst_bands in itertools.product(range(M), repeat=B):
            for new_bands in itertools.product(range(M), repeat=delta_b):
                X = np.zeros((L, M), dtype=np.int8)
                for b, m in enumerate(inst_bands):
                    X[b, m] = 1
                for c, m in zip(chosen, new_bands):
                    X[B + c, m] = 1
                obj = objective_value(X, coeffs)
                key = (-obj, tuple(X.reshape(-1)))
                if best is None or key < best[0]:
                    best = (key, X)
    assert best is not None
    X = best[1]
    assignment = AssignmentMatrix(X=X, num_installed=B, num_candidates=C, delta_b=delta_b)
    return SolveResult(
        assignment=assignment,
        objective=objective_value(assignment, coeffs),
        time_limited=False,
    )


def random_assignment(
    B: int, C: int, M: int, delta_b: int, rng: np.random.Generator
) -> AssignmentMatrix:
    """Random feasible assignment with every band covered by at least
    floor(B/M) installed stations; candidates chosen uniformly."""
    if delta_b > C:
        raise ValueError("infeasible counts: delta_b exceeds candidate locations")
    floor = B // M
    bands = np.empty(B, dtype=int)
    perm = rng.permutation(B)
    for m in range(M):
        bands[perm[m * floor : (m + 1) * floor]] = m
    rest = perm[M * floor :]
    bands[rest] = rng.integers(0, M, rest.size)
    X = np.zeros((B + C, M), dtype=np.int8)
    X[np.arange(B), bands] = 1
    if delta_b:
        chosen = rng.choice(C, size=delta_b, replace=False)
        X[B + chosen, rng.integers(0, M, delta_b)] = 1
    return AssignmentMatrix(X=X, num_installed=B, num_candidates=C, delta_b=delta_b)


def max_separation_assignment(
    layout,
    B: int,
    C: int,
    M: int,
    delta_b: int,
    time_limit_s: float = 10.0,
) -> SolveResult:
    """Heuristic baseline: maximize the summed pairwise distance between
    co-band stations, reusing the branch-and-bound machinery.

    Without further constraints that objective is maximized by piling every
    station onto one band, so the same per-band installed floor as the random
    baseline (floor(B/M)) is enforced.
    """
    from unbplan import geometry

    locs = (*layout.installed, *layout.candidates)
    if len(locs) != B + C:
        raise ValueError("layout does not match (B, C)")
    L = B + C
    quad = np.zeros((L, L, M))
    for b in range(L):
        for v in range(b + 1, L):
            d = geometry.distance(locs[b], locs[v])
            quad[b, v, :] = -d
            quad[v, b, :] = -d
    coeffs = ObjectiveCoefficients(linear=np.zeros((L, M)), quadratic=quad)
    if M**B <= ENUM_CAP and delta_b <= 1 and (delta_b == 0 or C > 0):
        return _enumerate_p3(coeffs, B, C, M, delta_b, installed_band_floor=B // M)
    return _solve_milp(
        coeffs, B, C, M, delta_b, time_limit_s, installed_band_floor=B // M
    )


def sampled_coefficient_blocks(indicators: np.ndarray) -> list[np.ndarray]:
    """Per-band second-moment matrices of decode-indicator samples.

    ``indicators`` has shape (n_samples, L, M) with 0/1 entries; returns one
    (L, L) block per band, the sampled version of the objective's Hessian
    blocks (positive semi-definite by construction).
    """
    indicators = np.asarray(indicators, dtype=float)
    n, L, M = indicators.shape
    return [indicators[:, :, m].T @ indicators[:, :, m] / n for m in range(M)]
