import math

import numpy as np
import pytest

from unbplan import models
from unbplan.geometry import Disk, Location, NetworkLayout, Polygon
from unbplan.models import ModelParameters
from unbplan.traffic import IncumbentProfile, TrafficProfile


def table_traffic(**kw):
    defaults = dict(
        packets_per_hour=3.0, repetitions=3, packet_duration_s=160.0 / 600.0,
        signal_bandwidth_hz=600.0, num_bands=3, band_width_hz=200_000.0,
    )
    defaults.update(kw)
    return TrafficProfile(**defaults)


def test_activity_probability_hand_evaluation():
    # direct substitution: 2 * (3*3*(160/600)/3600) * 2 * (600/600000)
    p = models.activity_probability(table_traffic())
    assert p == pytest.approx(2.6666666666666667e-06, rel=1e-12)


def test_activity_probability_rejects_over_one():
    prof = table_traffic(packets_per_hour=1e9)
    with pytest.raises(ValueError, match="exceeds 1"):
        models.activity_probability(prof)


def test_active_density():
    region = Disk(10_000.0)
    lam = models.active_density(table_traffic(), 15708, region)
    p = models.activity_probability(table_traffic())
    assert lam == pytest.approx(15708 * p / (math.pi * 1e8))


def test_incumbent_activity_probability_full_band():
    # incumbent fills the band: frequency collision factor saturates at 1;
    # time window is the cross-duration sum T + T_I
    traffic = table_traffic()
    inc = IncumbentProfile(3.0, 1, 1600.0 / 200_000.0, 200_000.0, (1 / 3, 1 / 3, 1 / 3))
    p = models.incumbent_activity_probability(inc, traffic)
    assert p == pytest.approx(3 * 1 * (1600.0 / 200_000.0 + 160.0 / 600.0) / 3600.0)


def test_incumbent_density_splits_by_pmf():
    region = Disk(10_000.0)
    traffic = table_traffic()
    inc = IncumbentProfile(3.0, 1, 0.008, 200_000.0, (0.5, 0.3, 0.2))
    lam = models.incumbent_active_density(inc, traffic, 1000, region)
    assert lam.shape == (3,)
    assert lam[0] / lam[2] == pytest.approx(2.5)
    assert lam.sum() == pytest.approx(
        1000 * models.incumbent_activity_probability(inc, traffic) / (math.pi * 1e8)
    )


def test_epsilon_hand_value():
    # alpha=4: pi * lambda * (pi/2) / sin(pi/2)
    assert models.epsilon(1e-6, 0.0, 1.0, 4.0) == pytest.approx(4.934802200544679e-06)


def test_epsilon_requires_alpha_above_two():
    with pytest.raises(ValueError):
        models.epsilon(1e-6, 0.0, 1.0, 2.0)


def test_ccdf_monotonicity():
    eps = 1e-8
    taus = [0.1, 1.0, 10.0, 100.0]
    dists = [100.0, 1000.0, 5000.0]
    vals_tau = [models.ccdf_sinr(t, 1000.0, eps, 4.0) for t in taus]
    assert vals_tau == sorted(vals_tau, reverse=True)
    vals_d = [models.ccdf_sinr(10.0, d, eps, 4.0) for d in dists]
    assert vals_d == sorted(vals_d, reverse=True)
    vals_e = [models.ccdf_sinr(10.0, 1000.0, e, 4.0) for e in (1e-9, 1e-8, 1e-7)]
    assert vals_e == sorted(vals_e, reverse=True)


def test_ccdf_matches_interference_simulation():
    # independent Monte-Carlo oracle: Rayleigh-faded interferers from a
    # Poisson process on a large disk, noise negligible
    rng = np.random.default_rng(0)
    alpha, tau, lam = 4.0, 1.0, 3e-7
    p_ib = 600.0
    R = 30_000.0
    draws = 20_000
    hits = 0
    counts = rng.poisson(lam * math.pi * R * R, draws)
    for n in counts:
        r = R * np.sqrt(rng.random(n))
        interf = (rng.standard_exponential(n) * r ** (-alpha)).sum()
        h0 = rng.standard_exponential()
        hits += h0 * p_ib ** (-alpha) > tau * interf
    emp = hits / draws
    eps = models.epsilon(lam, 0.0, 1.0, alpha)
    model = models.ccdf_sinr(tau, p_ib, eps, alpha)
    assert abs(emp - model) < 0.02


def _mc_mean_exp(coef, region, center, n, rng):
    from unbplan import geometry

    xy = geometry.sample_uniform_xy(region, n, rng)
    d2 = (xy[:, 0] - center[0]) ** 2 + (xy[:, 1] - center[1]) ** 2
    return float(np.exp(-coef * d2).mean())


def test_adp_matches_mc_integration_disk():
    region = Disk(10_000.0)
    psi = 5e-8
    rng = np.random.default_rng(1)
    mc = _mc_mean_exp(psi, region, (0.0, 0.0), 1_000_000, rng)
    assert abs(models.adp(psi, region, Location(0.0, 0.0)) - mc) < 1e-3


def test_adp_matches_mc_integration_offcenter_and_polygon():
    rng = np.random.default_rng(2)
    region = Disk(10_000.0)
    bs = Location.from_xy(4000.0, -2500.0)
    mc = _mc_mean_exp(5e-8, region, (bs.x, bs.y), 1_000_000, rng)
    assert abs(models.adp(5e-8, region, bs) - mc) < 1e-3

    poly = Polygon(((0.0, 0.0), (8000.0, 0.0), (8000.0, 5000.0), (3000.0, 9000.0), (0.0, 5000.0)))
    bs2 = Location.from_xy(2000.0, 2000.0)
    mc2 = _mc_mean_exp(1e-7, poly, (bs2.x, bs2.y), 1_000_000, rng)
    assert abs(models.adp(1e-7, poly, bs2) - mc2) < 1e-3


def test_adp_edge_cases():
    region = Disk(1000.0)
    assert models.adp(0.0, region, Location(0.0, 0.0)) == 1.0
    with pytest.raises(ValueError):
        models.adp(1e-8, region, Location.from_xy(5000.0, 0.0))
    with pytest.raises(ValueError):
        models.adp(-1.0, region, Location(0.0, 0.0))


def test_capital_psi_matches_mc():
    region = Disk(10_000.0)
    alpha, tau = 4.0, 10.0
    s = 5e-8  # eps * tau^(2/alpha)
    eps = s / tau ** (2.0 / alpha)
    coef = (2.0 / alpha + 1.0) * s
    rng = np.random.default_rng(3)
    mc = _mc_mean_exp(coef, region, (0.0, 0.0), 1_000_000, rng)
    assert abs(models.capital_psi(eps, tau, alpha, region) - mc) < 1e-3


def test_jdp_shapes_and_bounds():
    psi, cap = 5e-8, 0.6
    ds = np.linspace(0.0, 10_000.0, 12)
    vals = [models.jdp(psi, cap, d) for d in ds]
    assert vals[0] == pytest.approx(cap)
    assert all(a > b for a, b in zip(vals, vals[1:]))  # strictly decreasing
    assert all(0.0 <= v <= cap for v in vals)
    with pytest.raises(ValueError):
        models.jdp(psi, 1.5, 100.0)


def test_jdp_conditional_bound_factorizes():
    eps, tau, alpha = 1e-8, 10.0, 4.0
    s = eps * tau ** (2.0 / alpha)
    v = models.jdp_conditional_bound(eps, tau, alpha, 1000.0, 2000.0)
    expect = math.exp(-0.5 * s * 1000.0**2) * math.exp(-1.5 * s * 2000.0**2)
    assert v == pytest.approx(expect, rel=1e-12)


def test_analytic_parameters_composition():
    region = Disk(10_000.0)
    traffic = table_traffic()
    inc = IncumbentProfile(3.0, 1, 0.008, 200_000.0, (0.6, 0.3, 0.1))
    params = models.analytic_parameters(
        traffic, inc, 15708, 15708, region, alpha=4.0, tau=10.0, incumbent_ratio=1.0
    )
    assert params.num_bands == 3
    # heavier incumbent load on band 0 -> larger eps, smaller ADP
    assert params.eps[0] > params.eps[1] > params.eps[2]
    np.testing.assert_allclose(params.psi, params.eps * 10.0**0.5)
    adps = [models.adp(float(p), region, Location(0.0, 0.0)) for p in params.psi]
    assert adps[0] < adps[1] < adps[2]


def test_model_parameters_yaml_roundtrip(tmp_path):
    params = ModelParameters(
        alpha=4.0, tau=10.0, region=Disk(5000.0),
        eps=[1e-9, 2e-9], psi=[3e-9, 4e-9], cap_psi=[0.5, 0.75],
    )
    path = tmp_path / "p.yaml"
    params.save(path)
    back = ModelParameters.load(path)
    assert back.alpha == params.alpha and back.tau == params.tau
    assert back.region == params.region
    np.testing.assert_allclose(back.eps, params.eps)
    np.testing.assert_allclose(back.psi, params.psi)
    np.testing.assert_allclose(back.cap_psi, params.cap_psi)


def test_predict_coefficients_compositional():
    region = Disk(5000.0)
    layout = NetworkLayout(
        installed=(Location.from_xy(0.0, 0.0), Location.from_xy(1000.0, 0.0)),
        candidates=(Location.from_xy(0.0, -2000.0),),
        temporary=(), region=region,
    )
    params = ModelParameters(
        alpha=4.0, tau=10.0, region=region,
        eps=[1e-8], psi=[2e-8], cap_psi=[0.7],
    )
    from unbplan import geometry

    co = models.predict_coefficients(params, layout)
    assert co.linear.shape == (3, 1)
    locs = layout.all_locations()
    for b in range(3):
        assert co.linear[b, 0] == pytest.approx(models.adp(2e-8, region, locs[b]))
        for v in range(3):
            if v == b:
                assert co.quadratic[b, v, 0] == 0.0
            else:
                d = geometry.distance(locs[b], locs[v])
                assert co.quadratic[b, v, 0] == pytest.approx(models.jdp(2e-8, 0.7, d))
