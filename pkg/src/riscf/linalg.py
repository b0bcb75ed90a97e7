"""Shared dense linear-algebra helpers.

Everything here operates on small Hermitian matrices (RIS or antenna
dimension), so dense eigendecompositions and Cholesky-free solves are fine.
"""

from __future__ import annotations

import numpy as np


class IllConditionedError(ValueError):
    """Raised when a Hermitian solve meets a numerically singular matrix."""


#: Condition-number ceiling above which Hermitian solves are refused.
CONDITION_LIMIT = 1e12


def hermitize(a: np.ndarray) -> np.ndarray:
    """Return the Hermitian part (A + A^H)/2 of a square matrix."""
    return 0.5 * (a + a.conj().swapaxes(-1, -2))


def psd_factor(a: np.ndarray, *, rel_tol: float = 1e-12) -> np.ndarray:
    """Factor a PSD Hermitian matrix as A = F F^H via eigendecomposition.

    Eigenvalues within ``rel_tol * max_eig`` of zero are clipped to zero so
    rank-deficient covariances (e.g. fully correlated RIS elements) factor
    cleanly.  A genuinely negative eigenvalue raises ValueError.
    """
    a = hermitize(np.asarray(a))
    eigvals, eigvecs = np.linalg.eigh(a)
    scale = float(eigvals[..., -1].max(initial=0.0))
    floor = -rel_tol * max(scale, 1.0)
    if eigvals.min(initial=0.0) < floor:
        raise ValueError(
            f"matrix is not PSD: min eigenvalue {eigvals.min():.3e} "
            f"with max {scale:.3e}"
        )
    clipped = np.clip(eigvals, 0.0, None)
    return eigvecs * np.sqrt(clipped)[..., None, :]


def solve_hermitian(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve A x = b for Hermitian positive-definite A with a condition guard.

    Accepts stacked systems (leading batch axes). Refuses any matrix whose
    2-norm condition number exceeds CONDITION_LIMIT instead of silently
    returning noise.
    """
    a = hermitize(np.asarray(a))
    eigvals = np.linalg.eigvalsh(a)
    lo, hi = eigvals[..., 0], eigvals[..., -1]
    if np.any(lo <= 0.0) or np.any(hi > CONDITION_LIMIT * lo):
        worst = np.where(lo <= 0.0, np.inf, hi / np.maximum(lo, 1e-300)).max()
        raise IllConditionedError(
            f"Hermitian solve refused: condition number {worst:.3e} exceeds "
            f"{CONDITION_LIMIT:.0e}"
        )
    return np.linalg.solve(a, b)


def sample_cn(rng: np.random.Generator, factor: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Draw CN(0, F F^H) vectors given a covariance factor F.

    ``factor`` has shape (n, r); the result has shape ``shape + (n,)``.
    Unit-variance complex Gaussians are built as (x + jy)/sqrt(2).
    """
    raw = rng.standard_normal(shape + (factor.shape[1], 2))
    w = (raw[..., 0] + 1j * raw[..., 1]) / np.sqrt(2.0)
    return np.einsum("...r,nr->...n", w, factor)


def sample_phases(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """Draw uniform phase factors e^{j theta} with theta ~ U[0, 2pi)."""
    return np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=shape))


def quadratic_block_trace(a: np.ndarray, cov: np.ndarray, n: int, l: int) -> np.ndarray:
    """E{X^H A X} for X with column-major vec covariance ``cov``.

    X is n x l, ``cov`` is (nl x nl) laid out in n-sized blocks: block
    (r, c) spans rows rn..(r+1)n and columns cn..(c+1)n (0-based half-open
    ranges). The (l, l') output entry is tr(A block(l', l)), which reduces
    to the familiar trace identity when cov is Kronecker.
    """
    if cov.shape != (n * l, n * l):
        raise ValueError(f"covariance must be {(n * l, n * l)}, got {cov.shape}")
    blocks = cov.reshape(l, n, l, n)
    return np.einsum("ab,pbqa->qp", a, blocks)
