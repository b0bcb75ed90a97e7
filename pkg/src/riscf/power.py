"""Uplink transmit power control.

Two policies on top of the closed-form SINR: a fractional heuristic that
hands weaker UEs relatively more power, and max-min fairness solved by
bisecting the common SINR target with a linear feasibility check at each
candidate.  Both return per-UE data powers in watts, capped at p_max.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimation import _coset_mask
from .pipeline import LinkStatistics
from .se import SinrTerms, optimal_lsfd_weights
from .simplex import feasible_point


@dataclass(frozen=True)
class PowerAllocation:
    """Per-UE powers plus how they were obtained.

    ``target`` is the certified common SINR lower bound for max-min (NaN
    otherwise); ``weights`` are the decoding weights the max-min solver
    committed to, when applicable.
    """

    powers: np.ndarray
    method: str
    iterations: int
    target: float
    weights: np.ndarray | None = None


def aggregate_gain(link: LinkStatistics) -> np.ndarray:
    """Total average channel gain per UE, summed over APs."""
    return np.trace(link.stats.r_o, axis1=-2, axis2=-1).real.sum(axis=0)


def fractional_power_control(
    gains: np.ndarray, alpha: float, p_max: float
) -> PowerAllocation:
    """Powers p_k = p_max (min_i gain_i / gain_k)^alpha.

    alpha = 0 recovers full power; larger alpha compresses the received
    power spread, with the weakest UE always at p_max.
    """
    gains = np.asarray(gains, dtype=float)
    if gains.ndim != 1 or gains.size == 0:
        raise ValueError("gains must be a non-empty vector")
    if np.any(gains <= 0) or not np.all(np.isfinite(gains)):
        raise ValueError("gains must be positive and finite")
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    eta = (gains.min() / gains) ** alpha
    return PowerAllocation(
        powers=eta * p_max, method="fpc", iterations=0, target=float("nan")
    )


def full_power(n_ues: int, p_max: float) -> PowerAllocation:
    """Every UE at p_max."""
    return PowerAllocation(
        powers=np.full(n_ues, p_max),
        method="full",
        iterations=0,
        target=float("nan"),
    )


def sinr_decomposition(
    terms: SinrTerms, weights: np.ndarray, noise_power: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Write the SINR as p_k num_k / (sum_i c[k, i] p_i + d_k).

    For fixed decoding weights the closed-form SINR is a ratio of a linear
    numerator to an affine denominator in the data powers, which is what
    both the bisection feasibility subproblem and its certificates need.
    """
    aw2 = np.abs(weights) ** 2
    num = np.abs(np.einsum("mk,mk->k", weights.conj(), terms.z)) ** 2
    c = np.einsum("kim,mk->ki", terms.xi, aw2)
    inner = np.einsum("mk,kim->ki", weights.conj(), terms.varpi)
    n_ues = terms.z.shape[1]
    off_coset = _coset_mask(terms.assignment) - np.eye(n_ues)
    p_hat = terms.pilot_powers
    c = c + terms.tau_p**2 * np.outer(p_hat, p_hat) * np.abs(inner) ** 2 * off_coset
    idx = np.arange(n_ues)
    c[idx, idx] -= np.einsum("mk,mk->k", aw2, terms.j2)
    d = np.einsum("mk,mk->k", aw2, noise_power * terms.z + terms.w)
    return num, c, d


def maxmin_power_control(
    terms: SinrTerms,
    noise_power: float,
    p_max: float,
    tol: float = 1e-3,
) -> PowerAllocation:
    """Max-min fair powers by bisection on the common SINR target.

    Decoding weights are fixed to the optimum under full power; with them
    held, feasibility of a target t is a linear program in the powers.
    Bisection keeps a feasible witness at all times, so the returned
    allocation certifiably reaches ``target`` and never falls below the
    full-power minimum.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n_ues = terms.z.shape[1]
    p_full = np.full(n_ues, p_max)
    opt = optimal_lsfd_weights(terms, p_full, noise_power)
    weights = opt.weights
    num, c, d = sinr_decomposition(terms, weights, noise_power)
    if np.any(d <= 0):
        raise ValueError("SINR denominator offsets must be positive")
    full_sinr = p_full * num / (c @ p_full + d)
    t_lo = float(full_sinr.min())
    t_hi = float(np.max(p_max * num / d))
    x_best = np.ones(n_ues)
    iterations = 0
    while t_hi - t_lo > tol:
        t = 0.5 * (t_lo + t_hi)
        g = p_max * (np.diag(num / t) - c)
        scale = np.maximum(np.abs(g).max(axis=1), np.abs(d))
        scale[scale == 0] = 1.0
        result = feasible_point(g / scale[:, None], d / scale)
        iterations += 1
        if result.feasible:
            t_lo, x_best = t, result.x
        else:
            t_hi = t
    powers = x_best * p_max
    achieved = powers * num / (c @ powers + d)
    if achieved.min() < t_lo - 1e-8 * max(t_lo, 1.0):
        raise RuntimeError("bisection witness lost feasibility")
    return PowerAllocation(
        powers=powers,
        method="maxmin",
        iterations=iterations,
        target=t_lo,
        weights=weights,
    )
