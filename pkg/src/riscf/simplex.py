"""Dense phase-1 simplex for box-constrained linear feasibility.

Decides whether {x : A x >= b, 0 <= x <= 1} is non-empty and returns a
vertex when it is.  The driver is the bisection step of max-min power
control, where every candidate SINR target induces one such system.
Bland's rule keeps the pivoting finite; the systems are small (one row
per UE), so a dense tableau is the simplest correct choice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_EPS = 1e-10


@dataclass(frozen=True)
class SimplexResult:
    """Feasibility verdict, a witness point when feasible, and diagnostics."""

    feasible: bool
    x: np.ndarray | None
    objective: float
    iterations: int


def feasible_point(
    a_mat: np.ndarray,
    b_vec: np.ndarray,
    tol: float = 1e-9,
    max_iter: int = 10000,
) -> SimplexResult:
    """Search for x with a_mat @ x >= b_vec and 0 <= x <= 1.

    The system is rewritten in equality form with surplus and upper-bound
    slack variables; artificial variables cover rows whose surplus cannot
    start basic, and phase 1 minimizes their sum.  A minimum above ``tol``
    proves infeasibility.  Callers should normalize rows so ``tol`` is
    meaningful.
    """
    a_mat = np.asarray(a_mat, dtype=float)
    b_vec = np.asarray(b_vec, dtype=float)
    if a_mat.ndim != 2 or b_vec.ndim != 1 or a_mat.shape[0] != b_vec.size:
        raise ValueError("a_mat must be (m, n) and b_vec (m,)")
    if not (np.all(np.isfinite(a_mat)) and np.all(np.isfinite(b_vec))):
        raise ValueError("constraint data must be finite")
    m, n = a_mat.shape

    # Columns: x (n) | surplus (m) | bound slack (n) | artificials.
    rows = m + n
    base_cols = n + m + n
    tab = np.zeros((rows, base_cols))
    rhs = np.zeros(rows)
    basis = np.full(rows, -1, dtype=int)
    art_rows = []
    for i in range(m):
        row, surplus, r = a_mat[i].copy(), -1.0, b_vec[i]
        if r <= 0:
            row, surplus, r = -row, 1.0, -r
        tab[i, :n] = row
        tab[i, n + i] = surplus
        rhs[i] = r
        if surplus > 0:
            basis[i] = n + i
        else:
            art_rows.append(i)
    for j in range(n):
        i = m + j
        tab[i, j] = 1.0
        tab[i, n + m + j] = 1.0
        rhs[i] = 1.0
        basis[i] = n + m + j

    total = base_cols + len(art_rows)
    full = np.zeros((rows, total))
    full[:, :base_cols] = tab
    for t, i in enumerate(art_rows):
        full[i, base_cols + t] = 1.0
        basis[i] = base_cols + t

    obj_row = np.zeros(total)
    obj_row[base_cols:] = 1.0
    obj_rhs = 0.0
    for i in art_rows:
        obj_row -= full[i]
        obj_rhs -= rhs[i]

    iterations = 0
    while True:
        entering = -1
        for j in range(total):
            if obj_row[j] < -_EPS:
                entering = j
                break
        if entering < 0:
            break
        leaving = -1
        best_ratio = np.inf
        for i in range(rows):
            if full[i, entering] > _EPS:
                ratio = rhs[i] / full[i, entering]
                better = ratio < best_ratio - 1e-15
                tie = abs(ratio - best_ratio) <= 1e-15
                if better or (tie and leaving >= 0 and basis[i] < basis[leaving]):
                    leaving, best_ratio = i, ratio
        if leaving < 0:
            raise RuntimeError("phase-1 objective unbounded; input is corrupt")
        pivot = full[leaving, entering]
        full[leaving] /= pivot
        rhs[leaving] /= pivot
        for i in range(rows):
            if i != leaving and full[i, entering] != 0.0:
                factor = full[i, entering]
                full[i] -= factor * full[leaving]
                rhs[i] -= factor * rhs[leaving]
        factor = obj_row[entering]
        obj_row -= factor * full[leaving]
        obj_rhs -= factor * rhs[leaving]
        np.clip(rhs, 0.0, None, out=rhs)
        basis[leaving] = entering
        iterations += 1
        if iterations > max_iter:
            raise RuntimeError(
                f"simplex exceeded {max_iter} iterations on a {m}x{n} system"
            )

    objective = -obj_rhs
    if objective > tol:
        return SimplexResult(
            feasible=False, x=None, objective=objective, iterations=iterations
        )
    x = np.zeros(n)
    for i in range(rows):
        if 0 <= basis[i] < n:
            x[basis[i]] = rhs[i]
    x = np.clip(x, 0.0, 1.0)
    residual = a_mat @ x - b_vec
    if residual.min() < -1e-7:
        raise RuntimeError("simplex returned a point violating the constraints")
    return SimplexResult(feasible=True, x=x, objective=objective, iterations=iterations)
