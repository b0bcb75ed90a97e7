"""Shared fixtures: small deterministic links reused across test modules."""
import numpy as np
import pytest

from riscf.config import SystemConfig
from riscf.pipeline import build_link_statistics
from riscf.scenario import generate_scenario
from riscf.se import build_sinr_terms


def make_link(config, seed):
    """One scenario drop plus its full second-order link statistics."""
    rng = np.random.default_rng(seed)
    scenario = generate_scenario(config, rng)
    return build_link_statistics(scenario, config)


@pytest.fixture(scope="session")
def validation_config():
    return SystemConfig(
        n_aps=3,
        n_ues=4,
        n_ap_antennas=2,
        ris_width_elements=4,
        ris_height_elements=2,
        tau_p=2,
        rho_db=20.0,
    )


@pytest.fixture(scope="session")
def validation_link(validation_config):
    return make_link(validation_config, 1)


@pytest.fixture(scope="session")
def validation_terms(validation_link):
    return build_sinr_terms(validation_link)


@pytest.fixture(scope="session")
def tiny_config():
    return SystemConfig(
        n_aps=2,
        n_ues=2,
        n_ap_antennas=1,
        ris_width_elements=2,
        ris_height_elements=2,
        tau_p=2,
        rho_db=20.0,
    )


@pytest.fixture(scope="session")
def tiny_link(tiny_config):
    return make_link(tiny_config, 5)
