"""Power control: fractional heuristic, decomposition, max-min bisection."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from riscf.power import (
    aggregate_gain,
    fractional_power_control,
    full_power,
    maxmin_power_control,
    sinr_decomposition,
)
from riscf.se import optimal_lsfd_weights, sinr_lsfd_closed_form


def test_full_power_vector():
    alloc = full_power(4, 0.2)
    assert np.allclose(alloc.powers, 0.2)
    assert alloc.method == "full"


def test_fractional_exact_values():
    gains = np.array([4.0, 1.0, 16.0])
    alloc = fractional_power_control(gains, 0.5, 0.2)
    assert alloc.powers == pytest.approx([0.1, 0.2, 0.05])


def test_fractional_weakest_gets_full_power():
    rng = np.random.default_rng(0)
    gains = rng.uniform(1e-9, 1e-6, 7)
    alloc = fractional_power_control(gains, 0.6, 0.2)
    assert alloc.powers[np.argmin(gains)] == pytest.approx(0.2)
    assert np.all(alloc.powers <= 0.2 + 1e-15)


@given(
    st.lists(st.floats(min_value=1e-9, max_value=1e-5), min_size=2, max_size=8),
    st.floats(min_value=0.0, max_value=2.0),
)
@settings(max_examples=50)
def test_fractional_monotone_in_gain(gains, alpha):
    gains = np.asarray(gains)
    alloc = fractional_power_control(gains, alpha, 0.2)
    order = np.argsort(gains)
    assert np.all(np.diff(alloc.powers[order]) <= 1e-15)


def test_fractional_alpha_zero_is_full_power():
    gains = np.array([1e-8, 5e-7, 2e-6])
    alloc = fractional_power_control(gains, 0.0, 0.2)
    assert np.allclose(alloc.powers, 0.2)


def test_fractional_rejects_bad_gains():
    with pytest.raises(ValueError):
        fractional_power_control(np.array([1.0, 0.0]), 0.5, 0.2)
    with pytest.raises(ValueError):
        fractional_power_control(np.array([1.0, np.nan]), 0.5, 0.2)
    with pytest.raises(ValueError):
        fractional_power_control(np.array([1.0, 2.0]), -0.1, 0.2)


def test_aggregate_gain_positive(validation_link):
    gains = aggregate_gain(validation_link)
    assert gains.shape == (validation_link.config.n_ues,)
    assert np.all(gains > 0)


def test_decomposition_reproduces_closed_form(validation_terms, validation_config):
    """p_k num_k / (c_k . p + d_k) is the closed-form SINR identically."""
    noise = validation_config.noise_power
    p_full = np.full(validation_config.n_ues, validation_config.p_max)
    weights = optimal_lsfd_weights(validation_terms, p_full, noise).weights
    num, c, d = sinr_decomposition(validation_terms, weights, noise)
    rng = np.random.default_rng(1)
    for _ in range(10):
        p = rng.uniform(0.01, 1.0, validation_config.n_ues) * validation_config.p_max
        direct = sinr_lsfd_closed_form(validation_terms, weights, p, noise)
        assembled = p * num / (c @ p + d)
        assert np.allclose(assembled, direct, rtol=1e-10)


def test_maxmin_improves_min_sinr(validation_terms, validation_config):
    noise = validation_config.noise_power
    p_max = validation_config.p_max
    alloc = maxmin_power_control(validation_terms, noise, p_max, tol=1e-3)
    assert np.all(alloc.powers >= -1e-12)
    assert np.all(alloc.powers <= p_max + 1e-12)

    achieved = sinr_lsfd_closed_form(
        validation_terms, alloc.weights, alloc.powers, noise
    )
    full_sinr = optimal_lsfd_weights(
        validation_terms, np.full(validation_config.n_ues, p_max), noise
    ).sinr
    assert achieved.min() >= full_sinr.min() - 1e-3
    assert achieved.min() >= alloc.target - 1e-8


def test_maxmin_iteration_bound(validation_terms, validation_config):
    noise = validation_config.noise_power
    p_max = validation_config.p_max
    alloc = maxmin_power_control(validation_terms, noise, p_max, tol=1e-3)
    weights = alloc.weights
    num, c, d = sinr_decomposition(validation_terms, weights, noise)
    t_hi = float(np.max(p_max * num / d))
    assert alloc.iterations <= math.ceil(math.log2(t_hi / 1e-3))


def test_maxmin_balances_sinrs(validation_terms, validation_config):
    """Bisection pushes the spread of achieved SINRs toward the target."""
    noise = validation_config.noise_power
    alloc = maxmin_power_control(
        validation_terms, noise, validation_config.p_max, tol=1e-4
    )
    achieved = sinr_lsfd_closed_form(
        validation_terms, alloc.weights, alloc.powers, noise
    )
    full_sinr = optimal_lsfd_weights(
        validation_terms,
        np.full(validation_config.n_ues, validation_config.p_max),
        noise,
    ).sinr
    assert achieved.min() / full_sinr.min() > 1.0 or np.isclose(
        achieved.min(), full_sinr.min(), rtol=1e-3
    )
    assert achieved.min() >= alloc.target - 1e-8


def test_maxmin_tolerance_validation(validation_terms, validation_config):
    with pytest.raises(ValueError):
        maxmin_power_control(
            validation_terms, validation_config.noise_power, validation_config.p_max, tol=0.0
        )
    with pytest.raises(ValueError):
        maxmin_power_control(
            validation_terms, validation_config.noise_power, -0.1, tol=1e-3
        )
