import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unbplan import fitting, models
from unbplan.fitting import JdpSample, fit_band_params
from unbplan.geometry import Disk, Location, NetworkLayout
from unbplan.stats import PairwiseStats


def synth_samples(psi, cap, seps, noise_rng=None, n_obs=1000):
    out = []
    for d in seps:
        p = models.jdp(psi, cap, d)
        if noise_rng is not None:
            p = noise_rng.binomial(n_obs, p) / n_obs
        out.append(JdpSample(float(d), float(p), float(n_obs)))
    return out


def test_noiseless_recovery():
    psi, cap = 5e-8, 0.6
    seps = np.linspace(500.0, 9000.0, 10)
    fit = fit_band_params(synth_samples(psi, cap, seps))
    assert abs(fit.psi - psi) / psi < 1e-4
    assert abs(fit.cap_psi - cap) / cap < 1e-4
    assert fit.converged


def test_sample_validation():
    with pytest.raises(ValueError):
        JdpSample(-1.0, 0.5)
    with pytest.raises(ValueError):
        JdpSample(1.0, 1.5)
    with pytest.raises(ValueError):
        JdpSample(1.0, 0.5, weight=0.0)


def test_underdetermined_single_separation():
    samples = [JdpSample(1000.0, 0.5), JdpSample(1000.0, 0.52)]
    with pytest.raises(ValueError, match="underdetermined"):
        fit_band_params(samples)


def test_noisy_fit_stays_in_bounds_and_close():
    rng = np.random.default_rng(0)
    psi, cap = 2e-8, 0.8
    seps = rng.uniform(500.0, 12_000.0, 20)
    fit = fit_band_params(synth_samples(psi, cap, seps, noise_rng=rng))
    assert 0.0 < fit.cap_psi < 1.0
    assert fit.psi > 0.0
    assert abs(fit.psi - psi) / psi < 0.25
    assert abs(fit.cap_psi - cap) / cap < 0.05


def test_fit_handles_all_zero_observations():
    samples = [JdpSample(d, 0.0) for d in (1000.0, 2000.0, 3000.0)]
    fit = fit_band_params(samples)
    assert 0.0 < fit.cap_psi <= 1e-3 + 1e-6


@settings(max_examples=25, deadline=None)
@given(
    psi=st.floats(1e-9, 1e-6),
    cap=st.floats(0.05, 0.95),
)
def test_generate_then_fit_property(psi, cap):
    seps = np.linspace(300.0, 6000.0, 12)
    fit = fit_band_params(synth_samples(psi, cap, seps))
    # predictions must agree even if the parameters trade off slightly
    for d in (500.0, 2500.0, 5000.0):
        a = models.jdp(psi, cap, d)
        b = models.jdp(fit.psi, fit.cap_psi, d)
        assert abs(a - b) < 1e-6


def test_fit_all_bands_from_stats():
    region = Disk(10_000.0)
    locs = [Location.from_xy(x, y) for x, y in
            [(0, 0), (3000, 0), (0, 4000), (-5000, 1000), (2000, -6000)]]
    layout = NetworkLayout(tuple(locs), (), (), region)
    psi_true = [3e-8, 6e-8]
    cap_true = [0.7, 0.5]
    from unbplan import geometry

    st_counts = PairwiseStats()
    n = 10**6
    for m in range(2):
        for a in range(len(locs)):
            for b in range(a + 1, len(locs)):
                d = geometry.distance(locs[a], locs[b])
                p = models.jdp(psi_true[m], cap_true[m], d)
                st_counts.jdp[(a, b, m)] = (int(round(p * n)), n)
    params = fitting.fit_all_bands(st_counts, layout, alpha=4.0, tau=10.0, num_bands=2)
    np.testing.assert_allclose(params.psi, psi_true, rtol=1e-3)
    np.testing.assert_allclose(params.cap_psi, cap_true, rtol=1e-3)
    np.testing.assert_allclose(params.eps, params.psi / 10.0**0.5)
    assert params.region == region
