import math

import numpy as np
import pytest

from unbplan.stats import InsufficientDataError, PairwiseStats, empirical_adp, \
    empirical_jdp, empirical_pdp, empirical_tdp
from unbplan.traffic import DecodingLog, Receiver
from unbplan.geometry import Location


def make_log(observed, decoded, joint_decoded=None, joint_observed=None,
             packets=(0, 0), reps=(0, 0)):
    return DecodingLog(
        horizon_s=600.0, repetitions=3, receivers=(),
        observed=dict(observed), decoded=dict(decoded),
        joint_decoded=dict(joint_decoded or {}), joint_observed=dict(joint_observed or {}),
        packets_total=packets[0], packets_decoded=packets[1],
        reps_total=reps[0], reps_decoded=reps[1],
    )


def test_empirical_adp_bernoulli():
    rng = np.random.default_rng(0)
    n, p = 10_000, 0.37
    dec = int(rng.binomial(n, p))
    log = make_log({(0, 1): n}, {(0, 1): dec})
    est = empirical_adp(log, 0, 1)
    assert abs(est - p) < 0.015  # 3 sigma of binomial at 1e4 trials


def test_empirical_jdp_product_of_independents():
    rng = np.random.default_rng(1)
    n = 10_000
    a = rng.random(n) < 0.5
    b = rng.random(n) < 0.5
    log = make_log(
        {(0, 0): n, (1, 0): n},
        {(0, 0): int(a.sum()), (1, 0): int(b.sum())},
        joint_decoded={(0, 1, 0): int((a & b).sum())},
        joint_observed={(0, 1, 0): n},
    )
    assert abs(empirical_jdp(log, 0, 1, 0) - 0.25) < 0.015
    assert abs(empirical_jdp(log, 1, 0, 0) - 0.25) < 0.015  # order-insensitive


def test_empirical_jdp_same_location_is_adp():
    log = make_log({(2, 0): 10}, {(2, 0): 7})
    assert empirical_jdp(log, 2, 2, 0) == pytest.approx(0.7)


def test_insufficient_data_errors():
    log = make_log({}, {})
    with pytest.raises(InsufficientDataError, match="insufficient data"):
        empirical_adp(log, 0, 0)
    with pytest.raises(InsufficientDataError):
        empirical_jdp(log, 0, 1, 0)
    with pytest.raises(InsufficientDataError):
        empirical_pdp(log)
    with pytest.raises(InsufficientDataError):
        empirical_tdp(log)


def test_pdp_tdp_fractions():
    log = make_log({}, {}, packets=(100, 90), reps=(300, 120))
    assert empirical_pdp(log) == pytest.approx(0.9)
    assert empirical_tdp(log) == pytest.approx(0.4)


def test_pairwise_stats_merge_is_count_addition():
    log1 = make_log({(0, 0): 100}, {(0, 0): 40},
                    joint_decoded={(0, 1, 0): 10}, joint_observed={(0, 1, 0): 100})
    log2 = make_log({(0, 0): 50}, {(0, 0): 30},
                    joint_decoded={(0, 1, 0): 20}, joint_observed={(0, 1, 0): 50})
    st = PairwiseStats.from_logs([log1, log2])
    assert st.adp[(0, 0)] == (70, 150)
    assert st.adp_estimate(0, 0) == pytest.approx(70 / 150)
    assert st.jdp[(0, 1, 0)] == (30, 150)
    assert st.jdp_estimate(1, 0, 0) == pytest.approx(0.2)
    assert st.jdp_weight(0, 1, 0) == 150
    assert st.has_adp(0, 0) and not st.has_adp(5, 0)
    assert st.has_jdp(1, 0, 0) and not st.has_jdp(0, 2, 0)
    with pytest.raises(InsufficientDataError):
        st.adp_estimate(9, 9)
    with pytest.raises(InsufficientDataError):
        st.jdp_estimate(0, 2, 0)


def test_stats_csv_roundtrip(tmp_path):
    st = PairwiseStats(
        adp={(0, 0): (3, 10), (1, 2): (5, 9)},
        jdp={(0, 1, 0): (2, 10)},
    )
    path = tmp_path / "stats.csv"
    st.save_csv(path)
    back = PairwiseStats.load_csv(path)
    assert back.adp == st.adp
    assert back.jdp == st.jdp


def test_stats_csv_rejects_unknown_record(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("record,loc_a,loc_b,band,decoded,observed\nxdp,0,,0,1,2\n")
    with pytest.raises(ValueError, match="unknown record"):
        PairwiseStats.load_csv(path)
