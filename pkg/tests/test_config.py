import math

import pytest

from unbplan.config import ExperimentConfig, db_to_linear, dbm_to_watts
from unbplan.geometry import Disk, Polygon


def test_dbm_to_watts_hand_value():
    assert dbm_to_watts(-146.0) == pytest.approx(2.5118864315095823e-18, rel=1e-9)
    assert dbm_to_watts(14.0) == pytest.approx(0.025118864315095794)
    assert db_to_linear(10.0) == pytest.approx(10.0)


def test_defaults_follow_duration_convention():
    cfg = ExperimentConfig()
    assert cfg.packet_duration_s == pytest.approx(160.0 / 600.0)
    assert cfg.incumbent_packet_duration_s == pytest.approx(1600.0 / 200_000.0)
    assert cfg.tau == pytest.approx(10.0)
    assert cfg.density_iot_per_m2 == pytest.approx(5e-5)


def test_explicit_duration_override():
    cfg = ExperimentConfig(packet_duration_s=0.5)
    assert cfg.packet_duration_s == 0.5


def test_unknown_keys_rejected():
    with pytest.raises(ValueError, match="unknown config keys: packet_durationn_s"):
        ExperimentConfig.from_dict({"packet_durationn_s": 1.0})


def test_negative_density_rejected():
    with pytest.raises(ValueError, match="density_iot_per_km2"):
        ExperimentConfig(density_iot_per_km2=-5.0)


def test_invalid_pathloss_rejected():
    with pytest.raises(ValueError, match="pathloss_exponent"):
        ExperimentConfig(pathloss_exponent=2.0)


def test_roundtrip_save_load(tmp_path):
    cfg = ExperimentConfig(num_installed=9, tau_db=5.0, seed=123)
    path = tmp_path / "cfg.yaml"
    cfg.save(path)
    back = ExperimentConfig.load(path)
    assert back == cfg
    # idempotent: a second round trip produces the same object again
    back.save(path)
    assert ExperimentConfig.load(path) == back


def test_region_construction():
    cfg = ExperimentConfig(region_radius_km=10.0)
    region = cfg.region()
    assert isinstance(region, Disk)
    assert region.radius == 10_000.0
    poly_cfg = ExperimentConfig(
        region_type="polygon",
        region_vertices_km=[[0, 0], [4, 0], [4, 3], [0, 3]],
    )
    poly = poly_cfg.region()
    assert isinstance(poly, Polygon)
    from unbplan import geometry

    assert geometry.area_of(poly) == pytest.approx(12e6)
    with pytest.raises(ValueError, match="region_vertices_km"):
        ExperimentConfig(region_type="polygon")


def test_channel_params_ratios():
    cfg = ExperimentConfig(tx_power_dbm=14.0, incumbent_power_dbm=8.0,
                           noise_power_dbm=-146.0)
    ch = cfg.channel_params()
    assert ch.incumbent_ratio == pytest.approx(10 ** ((8.0 - 14.0) / 10.0))
    assert ch.noise_ratio == pytest.approx(10 ** ((-146.0 - 14.0) / 10.0))
    assert ch.decode_threshold == pytest.approx(10.0)


def test_device_counts_scale_with_area():
    cfg = ExperimentConfig(region_radius_km=10.0, density_iot_per_km2=50.0)
    n_iot, n_inc = cfg.device_counts()
    assert n_iot == round(50.0 * math.pi * 100.0)
    assert n_inc == n_iot


def test_num_new_bounded_by_candidates():
    with pytest.raises(ValueError, match="num_new"):
        ExperimentConfig(num_candidates=2, num_new=3)
