"""System configuration defaults, derived quantities, and validation."""
import math

import pytest

from riscf.config import SystemConfig, config_from_mapping


def test_default_dimensions():
    cfg = SystemConfig()
    assert cfg.n_aps == 10
    assert cfg.n_ues == 5
    assert cfg.n_ap_antennas == 1
    assert cfg.n_ris_elements == 16
    assert cfg.tau_p == 3


def test_wavelength_and_element_area():
    cfg = SystemConfig()
    lam = 299792458.0 / 1.9e9
    assert cfg.wavelength == pytest.approx(lam, rel=1e-9)
    assert cfg.element_area == pytest.approx(0.25 * lam * lam, rel=1e-9)


def test_noise_and_transmit_power():
    cfg = SystemConfig()
    assert cfg.noise_power == pytest.approx(10.0 ** ((-94.0 - 30.0) / 10.0))
    assert cfg.p_max == pytest.approx(10.0 ** (-0.7))
    assert cfg.pilot_power_value == pytest.approx(cfg.p_max)


def test_explicit_pilot_power_overrides():
    cfg = SystemConfig(pilot_power=0.05)
    assert cfg.pilot_power_value == pytest.approx(0.05)


def test_prelog_fraction():
    cfg = SystemConfig(tau_c=200, tau_p=3)
    assert cfg.prelog == pytest.approx(1.0 - 3.0 / 200.0)


def test_replace_returns_modified_copy():
    cfg = SystemConfig()
    other = cfg.replace(n_ues=7, rho_db=None)
    assert other.n_ues == 7
    assert other.rho_db is None
    assert cfg.n_ues == 5


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n_aps": 0},
        {"n_ues": -1},
        {"n_ap_antennas": 0},
        {"ris_width_elements": 0},
        {"tau_p": 0},
        {"tau_p": 300, "tau_c": 200},
        {"p_max": -1.0},
        {"combiner": "zf"},
        {"emi": "maybe"},
        {"power": "waterfill"},
        {"ris": "half"},
        {"fpc_alpha": -0.5},
    ],
)
def test_invalid_configs_rejected(kwargs):
    with pytest.raises(ValueError):
        SystemConfig(**kwargs)


def test_mapping_round_trip():
    cfg = config_from_mapping({"n_aps": 4, "rho_db": 10.0, "ris_spacing_h": 0.25})
    assert cfg.n_aps == 4
    assert cfg.rho_db == 10.0
    assert cfg.ris_spacing_h == 0.25


def test_mapping_rejects_unknown_keys():
    with pytest.raises(ValueError, match="unknown"):
        config_from_mapping({"n_app": 4})


def test_mapping_coerces_yaml_booleans():
    cfg = config_from_mapping({"emi": True, "ris": False})
    assert cfg.emi == "on"
    assert cfg.ris == "off"


def test_mapping_accepts_ris_position_list():
    cfg = config_from_mapping({"ris_position_xy": [10.0, 20.0]})
    assert cfg.ris_position_xy == (10.0, 20.0)


def test_n_ris_elements_product():
    cfg = SystemConfig(ris_width_elements=8, ris_height_elements=3)
    assert cfg.n_ris_elements == 24


def test_rho_infinite_means_no_interference():
    assert SystemConfig(rho_db=math.inf).rho_db == math.inf
    assert SystemConfig(rho_db=None).rho_db is None
