"""Closed-form and numeric decoding-probability models.

The per-band interference coefficient feeds an exponential SINR tail; the
average and joint decoding probabilities follow by integrating that tail over
the device-location density of the region. The region integrals have no
closed form and are evaluated with adaptive Gauss-Legendre quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import yaml

from unbplan import geometry
from unbplan.geometry import AreaRegion, Disk, Location, NetworkLayout, Polygon
from unbplan.traffic import IncumbentProfile, TrafficProfile, SECONDS_PER_HOUR

__all__ = [
    "ModelParameters",
    "activity_probability",
    "active_density",
    "incumbent_activity_probability",
    "incumbent_active_density",
    "epsilon",
    "ccdf_sinr",
    "adp",
    "capital_psi",
    "jdp_conditional_bound",
    "jdp",
    "predict_coefficients",
    "analytic_parameters",
]


class IntegrationError(RuntimeError):
    pass


def activity_probability(traffic: TrafficProfile) -> float:
    """Probability that a device is transmitting at a random time/frequency.

    Collision-window form: the time factor doubles the duty cycle (a packet
    is vulnerable for twice its duration) and the frequency factor doubles
    the bandwidth fraction of the full multiplexing range.
    """
    duty = (
        traffic.packets_per_hour
        * traffic.repetitions
        * traffic.packet_duration_s
        / SECONDS_PER_HOUR
    )
    p = 2.0 * duty * 2.0 * (traffic.signal_bandwidth_hz / traffic.total_bandwidth_hz)
    if p > 1.0:
        raise ValueError(f"activity probability exceeds 1 (p = {p:.3g})")
    return p


def active_density(traffic: TrafficProfile, device_count: int, region: AreaRegion) -> float:
    """Density of concurrently active IoT devices (per square meter)."""
    if device_count < 0:
        raise ValueError("device_count must be >= 0")
    return device_count * activity_probability(traffic) / geometry.area_of(region)


def incumbent_activity_probability(
    incumbents: IncumbentProfile, traffic: TrafficProfile
) -> float:
    """Activity probability of one incumbent given its band.

    The time window is the cross-duration collision window seen by an IoT
    repetition (T + T_I, the analogue of the factor 2 for equal durations);
    the frequency factor is the collision window of the incumbent and IoT
    bandwidths within one band (1 when the incumbent fills the band).
    """
    rate = incumbents.packets_per_hour * incumbents.repetitions / SECONDS_PER_HOUR
    window = incumbents.packet_duration_s + traffic.packet_duration_s
    freq_factor = min(
        1.0,
        (incumbents.bandwidth_hz + traffic.signal_bandwidth_hz) / traffic.band_width_hz,
    )
    p = rate * window * freq_factor
    if p > 1.0:
        raise ValueError(f"activity probability exceeds 1 (p_I = {p:.3g})")
    return p


def incumbent_active_density(
    incumbents: IncumbentProfile,
    traffic: TrafficProfile,
    device_count: int,
    region: AreaRegion,
) -> np.ndarray:
    """Per-band density of active incumbents; the device population splits
    across bands by the incumbent band PMF."""
    p_i = incumbent_activity_probability(incumbents, traffic)
    pmf = np.asarray(incumbents.band_pmf)
    return device_count * pmf * p_i / geometry.area_of(region)


def epsilon(
    lambda_iot: float, lambda_inc: float, incumbent_ratio: float, alpha: float
) -> float:
    """Interference coefficient of the SINR tail (1/m^2)."""
    if alpha <= 2:
        raise ValueError("pathloss exponent must be > 2 for integrability")
    if lambda_iot < 0 or lambda_inc < 0:
        raise ValueError("densities must be >= 0")
    u = 2.0 * math.pi / alpha
    return math.pi * (lambda_iot + incumbent_ratio ** (2.0 / alpha) * lambda_inc) * u / math.sin(u)


def ccdf_sinr(tau: float, dist_m: float, eps: float, alpha: float) -> float:
    """Probability a transmission at the given link distance clears ``tau``
    (interference-limited, negligible noise)."""
    if alpha <= 2:
        raise ValueError("pathloss exponent must be > 2")
    if tau < 0 or dist_m < 0 or eps < 0:
        raise ValueError("inputs must be >= 0")
    return math.exp(-eps * tau ** (2.0 / alpha) * dist_m * dist_m)


# ---------------------------------------------------------------------------
# region integrals


def _attenuation(coef, d2, noise_coef, half_alpha):
    # exp(-coef d^2) interference tail, optionally damped by the known
    # thermal-noise term exp(-noise_coef d^alpha)
    ex = -coef * d2
    if noise_coef:
        ex = ex - noise_coef * d2**half_alpha
    return np.exp(ex)


def _disk_mean(
    coef: float, radius: float, bx: float, by: float, order: int,
    noise_coef: float = 0.0, half_alpha: float = 2.0,
) -> float:
    # mean of the attenuation over the disk, polar Gauss-Legendre
    nodes, weights = np.polynomial.legendre.leggauss(order)
    p = 0.5 * radius * (nodes + 1.0)
    wp = 0.5 * radius * weights
    th = math.pi * nodes
    wt = math.pi * weights
    px = np.outer(p, np.cos(th))
    py = np.outer(p, np.sin(th))
    d2 = (px - bx) ** 2 + (py - by) ** 2
    integrand = _attenuation(coef, d2, noise_coef, half_alpha) * p[:, None]
    total = float(np.sum(integrand * wp[:, None] * wt[None, :]))
    return total / (math.pi * radius * radius)


def _triangle_integral(coef, a, b, c, bx, by, order, noise_coef=0.0, half_alpha=2.0) -> float:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    u = 0.5 * (nodes + 1.0)
    wu = 0.5 * weights
    U, V = np.meshgrid(u, u, indexing="ij")
    WU, WV = np.meshgrid(wu, wu, indexing="ij")
    # collapsed map of the unit square onto the triangle, Jacobian u * |det|
    det = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
    x = a[0] + U * (b[0] - a[0]) + U * V * (c[0] - b[0])
    y = a[1] + U * (b[1] - a[1]) + U * V * (c[1] - b[1])
    d2 = (x - bx) ** 2 + (y - by) ** 2
    vals = _attenuation(coef, d2, noise_coef, half_alpha)
    return float(np.sum(vals * U * abs(det) * WU * WV))


def _region_mean_exp(
    coef: float, region: AreaRegion, center_xy: tuple[float, float], tol: float = 1e-6,
    noise_coef: float = 0.0, alpha: float = 4.0,
) -> float:
    """Mean of exp(-coef * |x - c|^2) over the region, adaptively refined."""
    bx, by = center_xy
    ha = alpha / 2.0
    if isinstance(region, Disk):
        prev = _disk_mean(coef, region.radius, bx, by, 48, noise_coef, ha)
        for order in (96, 192, 384, 768):
            cur = _disk_mean(coef, region.radius, bx, by, order, noise_coef, ha)
            if abs(cur - prev) < tol:
                return cur
            prev = cur
    else:
        tris = geometry.triangulate(region)
        area = geometry.area_of(region)

        def poly_eval(order):
            return sum(
                _triangle_integral(coef, *t, bx, by, order, noise_coef, ha)
                for t in tris
            ) / area

        prev = poly_eval(24)
        for order in (48, 96, 192):
            cur = poly_eval(order)
            if abs(cur - prev) < tol:
                return cur
            prev = cur
    raise IntegrationError("region integral did not converge at tolerance 1e-6")


def adp(
    psi: float, region: AreaRegion, bs: Location,
    noise_coef: float = 0.0, alpha: float = 4.0,
) -> float:
    """Average decoding probability at a station, integrated over a uniform
    source population in the region.

    ``noise_coef`` (units 1/m^alpha) adds the deterministic thermal-noise
    attenuation exp(-noise_coef * d^alpha); zero keeps the
    interference-limited form.
    """
    if psi < 0 or noise_coef < 0:
        raise ValueError("psi and noise_coef must be >= 0")
    if not geometry.contains(region, bs):
        raise ValueError("station must lie inside the region")
    if psi == 0.0 and noise_coef == 0.0:
        return 1.0
    return _region_mean_exp(psi, region, (bs.x, bs.y), noise_coef=noise_coef, alpha=alpha)


def capital_psi(eps: float, tau: float, alpha: float, region: AreaRegion) -> float:
    """Source-averaged joint-decoding prefactor; the region integral of the
    conditional-bound source term against the uniform device density."""
    if alpha <= 2:
        raise ValueError("pathloss exponent must be > 2")
    if eps < 0 or tau < 0:
        raise ValueError("inputs must be >= 0")
    coef = (2.0 / alpha + 1.0) * eps * tau ** (2.0 / alpha)
    if coef == 0.0:
        return 1.0
    return _region_mean_exp(coef, region, (0.0, 0.0))


def jdp_conditional_bound(
    eps: float, tau: float, alpha: float, d_bv: float, p_i: float
) -> float:
    """Upper bound on the joint decoding probability for a source at distance
    ``p_i`` from the midpoint of two stations separated by ``d_bv``."""
    if min(eps, tau, d_bv, p_i) < 0:
        raise ValueError("inputs must be >= 0")
    s = eps * tau ** (2.0 / alpha)
    return math.exp(-0.5 * s * d_bv * d_bv) * math.exp(-(2.0 / alpha + 1.0) * s * p_i * p_i)


def jdp(psi: float, cap_psi: float, d_bv: float) -> float:
    """Joint decoding probability of two co-band stations at separation d."""
    if psi < 0:
        raise ValueError("psi must be >= 0")
    if not 0.0 <= cap_psi <= 1.0:
        raise ValueError("capital psi must be a probability")
    if d_bv < 0:
        raise ValueError("separation must be >= 0")
    return cap_psi * math.exp(-0.5 * psi * d_bv * d_bv)


# ---------------------------------------------------------------------------
# parameter bundle


@dataclass
class ModelParameters:
    """Per-band model parameters plus the shared channel/region context.

    ``psi`` always equals ``eps * tau**(2/alpha)`` when built analytically;
    fitted parameters store the implied eps for reference.
    """

    alpha: float
    tau: float
    region: AreaRegion
    eps: np.ndarray  # per band, 1/m^2
    psi: np.ndarray  # per band, 1/m^2
    cap_psi: np.ndarray  # per band, probability

    def __post_init__(self) -> None:
        self.eps = np.asarray(self.eps, dtype=float)
        self.psi = np.asarray(self.psi, dtype=float)
        self.cap_psi = np.asarray(self.cap_psi, dtype=float)
        if not (self.eps.shape == self.psi.shape == self.cap_psi.shape):
            raise ValueError("per-band arrays must have equal length")
        if np.any(self.eps < 0) or np.any(self.psi < 0):
            raise ValueError("eps and psi must be >= 0")
        if np.any((self.cap_psi < 0) | (self.cap_psi > 1)):
            raise ValueError("capital psi must lie in [0, 1]")

    @property
    def num_bands(self) -> int:
        return self.eps.shape[0]

    def save(self, path) -> None:
        doc = {
            "alpha": float(self.alpha),
            "tau": float(self.tau),
            "region": geometry.region_to_dict(self.region),
            "bands": [
                {
                    "epsilon_per_m2": float(self.eps[m]),
                    "psi_per_m2": float(self.psi[m]),
                    "capital_psi": float(self.cap_psi[m]),
                }
                for m in range(self.num_bands)
            ],
        }
        with open(path, "w") as f:
            yaml.safe_dump(doc, f, sort_keys=False)

    @classmethod
    def load(cls, path) -> "ModelParameters":
        with open(path) as f:
            doc = yaml.safe_load(f)
        bands = doc["bands"]
        return cls(
            alpha=float(doc["alpha"]),
            tau=float(doc["tau"]),
            region=geometry.region_from_dict(doc["region"]),
            eps=[b["epsilon_per_m2"] for b in bands],
            psi=[b["psi_per_m2"] for b in bands],
            cap_psi=[b["capital_psi"] for b in bands],
        )


def analytic_parameters(
    traffic: TrafficProfile,
    incumbents: Optional[IncumbentProfile],
    iot_device_count: int,
    incumbent_device_count: int,
    region: AreaRegion,
    alpha: float,
    tau: float,
    incumbent_ratio: float,
) -> ModelParameters:
    """Model parameters derived from first principles (no fitting)."""
    lam = active_density(traffic, iot_device_count, region)
    if incumbents is not None:
        lam_inc = incumbent_active_density(
            incumbents, traffic, incumbent_device_count, region
        )
    else:
        lam_inc = np.zeros(traffic.num_bands)
    eps_m = np.array(
        [epsilon(lam, float(li), incumbent_ratio, alpha) for li in lam_inc]
    )
    psi_m = eps_m * tau ** (2.0 / alpha)
    cap = np.array([capital_psi(float(e), tau, alpha, region) for e in eps_m])
    return ModelParameters(
        alpha=alpha, tau=tau, region=region, eps=eps_m, psi=psi_m, cap_psi=cap
    )


def predict_coefficients(
    params: ModelParameters, layout: NetworkLayout, noise_coef: float = 0.0
):
    """Linear (ADP) and quadratic (JDP) objective coefficients for every
    installed and candidate location.

    ``noise_coef`` folds the known thermal-noise attenuation into the
    per-station terms; the pairwise terms keep the fitted separation model.
    """
    from unbplan.optimizer import ObjectiveCoefficients

    locs = (*layout.installed, *layout.candidates)
    L = len(locs)
    M = params.num_bands
    linear = np.zeros((L, M))
    quadratic = np.zeros((L, L, M))
    adp_cache = [
        [
            adp(float(params.psi[m]), params.region, loc,
                noise_coef=noise_coef, alpha=params.alpha)
            for m in range(M)
        ]
        for loc in locs
    ]
    for b in range(L):
        linear[b, :] = adp_cache[b]
    for b in range(L):
        for v in range(b + 1, L):
            d = geometry.distance(locs[b], locs[v])
            for m in range(M):
                val = jdp(float(params.psi[m]), float(params.cap_psi[m]), d)
                quadratic[b, v, m] = val
                quadratic[v, b, m] = val
    return ObjectiveCoefficients(linear=linear, quadratic=quadratic)
