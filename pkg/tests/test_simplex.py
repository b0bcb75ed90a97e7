"""Phase-1 feasibility solver for box-constrained linear inequality systems."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from riscf.simplex import feasible_point


def scipy_feasible(a_mat, b_vec):
    """Independent feasibility verdict for {A x >= b, 0 <= x <= 1}."""
    n = a_mat.shape[1]
    res = linprog(
        c=np.zeros(n),
        A_ub=-a_mat,
        b_ub=-b_vec,
        bounds=[(0.0, 1.0)] * n,
        method="highs",
    )
    return res.status == 0


def assert_feasible_solution(a_mat, b_vec, result, tol=1e-7):
    assert result.feasible
    assert np.all(result.x >= -tol) and np.all(result.x <= 1.0 + tol)
    assert np.all(a_mat @ result.x >= b_vec - tol)


def test_trivial_origin_feasible():
    a = np.array([[1.0, 1.0]])
    b = np.array([-1.0])
    res = feasible_point(a, b)
    assert_feasible_solution(a, b, res)


def test_single_variable_bound():
    a = np.array([[2.0]])
    b = np.array([1.0])
    res = feasible_point(a, b)
    assert_feasible_solution(a, b, res)
    assert res.x[0] >= 0.5 - 1e-9


def test_clearly_infeasible():
    a = np.array([[1.0, 1.0]])
    b = np.array([3.0])
    res = feasible_point(a, b)
    assert not res.feasible


def test_equality_boundary_feasible():
    """b exactly at the box maximum keeps a single feasible point."""
    a = np.array([[1.0, 1.0]])
    b = np.array([2.0])
    res = feasible_point(a, b)
    assert_feasible_solution(a, b, res, tol=1e-6)


def test_mixed_signs():
    a = np.array([[1.0, -1.0], [-1.0, 1.0], [1.0, 1.0]])
    b = np.array([-0.5, -0.5, 0.5])
    res = feasible_point(a, b)
    assert_feasible_solution(a, b, res)


@st.composite
def random_system(draw):
    m = draw(st.integers(min_value=1, max_value=6))
    n = draw(st.integers(min_value=1, max_value=6))
    seed = draw(st.integers(min_value=0, max_value=2**16))
    return m, n, seed


@given(random_system())
@settings(max_examples=60, deadline=None)
def test_constructed_feasible_systems(case):
    """Systems built around a known interior point must be solved."""
    m, n, seed = case
    rng = np.random.default_rng(seed)
    a = rng.uniform(-2.0, 2.0, (m, n))
    x0 = rng.uniform(0.1, 0.9, n)
    b = a @ x0 - rng.uniform(0.01, 0.5, m)
    res = feasible_point(a, b)
    assert_feasible_solution(a, b, res)


@given(random_system())
@settings(max_examples=60, deadline=None)
def test_verdict_matches_reference_solver(case):
    m, n, seed = case
    rng = np.random.default_rng(seed)
    a = rng.uniform(-2.0, 2.0, (m, n))
    b = rng.uniform(-1.0, 1.5, m)
    ours = feasible_point(a, b)
    assert ours.feasible == scipy_feasible(a, b)
    if ours.feasible:
        assert_feasible_solution(a, b, ours)


def test_infeasible_beyond_box_capacity():
    rng = np.random.default_rng(5)
    a = rng.uniform(-1.0, 1.0, (3, 4))
    cap = np.clip(a, 0.0, None).sum(axis=1)
    b = cap + 0.1
    res = feasible_point(a, b)
    assert not res.feasible
    assert not scipy_feasible(a, b)


def test_iteration_budget_respected():
    rng = np.random.default_rng(6)
    a = rng.uniform(-1.0, 1.0, (6, 6))
    x0 = rng.uniform(0.2, 0.8, 6)
    b = a @ x0 - 0.05
    res = feasible_point(a, b)
    assert res.feasible
    assert res.iterations <= 10000


def test_shape_validation():
    with pytest.raises(ValueError):
        feasible_point(np.ones((2, 2)), np.ones(3))
