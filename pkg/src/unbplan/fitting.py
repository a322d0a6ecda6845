"""Least-squares fit of the joint-decoding model to measured statistics.

Per band, the pairwise joint decoding probability is modelled as
``cap_psi * exp(-0.5 * psi * d**2)`` in the station separation ``d``. Both
parameters are constrained (psi > 0, cap_psi in (0, 1)) through smooth
reparameterization and fitted with a damped Gauss-Newton iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from unbplan import geometry
from unbplan.geometry import NetworkLayout
from unbplan.models import ModelParameters
from unbplan.stats import PairwiseStats

__all__ = ["JdpSample", "FitResult", "fit_band_params", "fit_all_bands"]


@dataclass(frozen=True)
class JdpSample:
    separation_m: float
    probability: float
    weight: float = 1.0

    def __post_init__(self) -> None:
        if self.separation_m < 0:
            raise ValueError("separation must be >= 0")
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError("probability must lie in [0, 1]")
        if self.weight <= 0:
            raise ValueError("weight must be > 0")


@dataclass
class FitResult:
    psi: float
    cap_psi: float
    sse: float
    iterations: int
    converged: bool


def _sigmoid(v: float) -> float:
    if v >= 0:
        return 1.0 / (1.0 + math.exp(-v))
    e = math.exp(v)
    return e / (1.0 + e)


def _initial_guess(d2: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    cap0 = min(max(float(y.max()), 1e-3), 1.0 - 1e-9)
    pos = y > 0
    if pos.sum() >= 2 and np.ptp(d2[pos]) > 0:
        # log y = log cap - 0.5 psi d^2: slope of the log-linear regression
        slope = np.polyfit(d2[pos], np.log(y[pos] / cap0), 1)[0]
        psi0 = max(-2.0 * slope, 1e-12)
    else:
        psi0 = 1.0 / float(d2.mean()) if d2.mean() > 0 else 1e-12
    return psi0, cap0


def fit_band_params(
    samples: Sequence[JdpSample],
    max_iters: int = 200,
    rel_tol: float = 1e-10,
) -> FitResult:
    """Fit (psi, cap_psi) to separation/probability samples.

    Raises ValueError when the samples cannot pin down both parameters
    (fewer than two distinct separations).
    """
    d2 = np.array([s.separation_m**2 for s in samples], dtype=float)
    y = np.array([s.probability for s in samples], dtype=float)
    w = np.array([s.weight for s in samples], dtype=float)
    if np.unique(d2).size < 2:
        raise ValueError(
            "underdetermined fit: need samples at two or more distinct separations"
        )

    psi0, cap0 = _initial_guess(d2, y)
    u = math.log(psi0)
    v = math.log(cap0 / (1.0 - cap0))

    def residuals(u, v):
        f = _sigmoid(v) * np.exp(-0.5 * math.exp(u) * d2)
        return f, (f - y)

    f, r = residuals(u, v)
    sse = float(np.sum(w * r * r))
    damping = 1e-3
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        # Jacobian in the transformed parameters
        ju = f * (-0.5 * math.exp(u) * d2)
        jv = f * (1.0 - _sigmoid(v))
        J = np.column_stack([ju, jv])
        g = J.T @ (w * r)
        H = J.T @ (w[:, None] * J)
        stepped = False
        for _ in range(60):
            A = H + damping * np.diag(np.maximum(np.diag(H), 1e-30))
            try:
                delta = np.linalg.solve(A, -g)
            except np.linalg.LinAlgError:
                damping *= 10.0
                continue
            # clamp so exp() stays finite even on wild damped steps
            u1 = float(np.clip(u + delta[0], -400.0, 400.0))
            v1 = float(np.clip(v + delta[1], -400.0, 400.0))
            f1, r1 = residuals(u1, v1)
            sse1 = float(np.sum(w * r1 * r1))
            if sse1 <= sse:
                rel = (sse - sse1) / max(sse, 1e-300)
                u, v, f, r, sse = u1, v1, f1, r1, sse1
                damping = max(damping / 10.0, 1e-15)
                stepped = True
                if rel < rel_tol:
                    converged = True
                break
            damping *= 10.0
        if converged or not stepped:
            converged = converged or not stepped
            break
    return FitResult(
        psi=math.exp(u), cap_psi=_sigmoid(v), sse=sse, iterations=it, converged=converged
    )


def samples_for_band(
    stats: PairwiseStats, layout: NetworkLayout, band: int
) -> list[JdpSample]:
    """Measured pairwise samples for one band, weighted by observation count."""
    locs = layout.all_locations()
    out = []
    for (a, b, m), (dec, obs) in sorted(stats.jdp.items()):
        if m != band or obs <= 0:
            continue
        d = geometry.distance(locs[a], locs[b])
        out.append(JdpSample(separation_m=d, probability=dec / obs, weight=float(obs)))
    return out


def fit_all_bands(
    stats: PairwiseStats,
    layout: NetworkLayout,
    *,
    alpha: float,
    tau: float,
    num_bands: int,
) -> ModelParameters:
    """Per-band fits packaged with the implied interference coefficient."""
    psi = np.empty(num_bands)
    cap = np.empty(num_bands)
    for m in range(num_bands):
        res = fit_band_params(samples_for_band(stats, layout, m))
        psi[m] = res.psi
        cap[m] = res.cap_psi
    eps = psi / tau ** (2.0 / alpha)
    return ModelParameters(
        alpha=alpha, tau=tau, region=layout.region, eps=eps, psi=psi, cap_psi=cap
    )
