"""Electromagnetic interference at the RIS and its effect at the APs.

EMI impinges the RIS as a correlated circular Gaussian field with
covariance A_r sigma_r^2 R and reaches each AP through the RIS-to-AP
channel, adding the covariance R_mm on top of thermal noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from riscf.linalg import psd_factor, quadratic_block_trace, sample_cn


@dataclass(frozen=True)
class EmiSpec:
    """EMI field parameters: power, element area, and RIS correlation."""

    sigma_r2: float
    element_area: float
    R: np.ndarray

    @property
    def covariance(self) -> np.ndarray:
        return self.sigma_r2 * self.element_area * self.R


@dataclass(frozen=True)
class EmiNoiseCovariance:
    """Per-AP covariance R_mm of RIS-borne EMI, with its NLoS part Q_m."""

    r_mm: np.ndarray
    q_m: np.ndarray


def sigma_r2_from_rho(
    rho_db: float | None, p_max: float, beta_m: np.ndarray
) -> float:
    """EMI power from the signal-to-EMI ratio rho = p_max sum(beta) / (M sigma_r^2).

    ``rho_db`` of None (or infinity) means no EMI.
    """
    beta_m = np.asarray(beta_m, dtype=float)
    if beta_m.size == 0:
        raise ValueError("beta_m must be non-empty")
    if rho_db is None or np.isinf(rho_db):
        return 0.0
    rho = 10.0 ** (rho_db / 10.0)
    return float(p_max * beta_m.sum() / (beta_m.size * rho))


def emi_noise_covariance(
    hbar: np.ndarray,
    phi: np.ndarray,
    R: np.ndarray,
    rtilde_m: np.ndarray,
    sigma_r2: float,
    element_area: float,
) -> EmiNoiseCovariance:
    """EMI covariance R_mm = sigma_r^2 A_r Hbar^H Phi R Phi^H Hbar + Q_m per AP.

    Q_m is the block trace of Phi R Phi^H against the RIS-to-AP NLoS
    covariance. The pilot-phase noise covariance is tau_p R_mm +
    tau_p sigma^2 I, assembled by the caller.
    """
    n_aps, n, l = hbar.shape
    phi_r = phi[:, None] * R * phi.conj()[None, :]
    los_part = np.einsum("mna,np,mpb->mab", hbar.conj(), phi_r, hbar)
    q_m = np.stack(
        [
            sigma_r2 * element_area * quadratic_block_trace(phi_r, rtilde_m[m], n, l)
            for m in range(n_aps)
        ]
    )
    return EmiNoiseCovariance(r_mm=sigma_r2 * element_area * los_part + q_m, q_m=q_m)


def sample_emi(
    spec: EmiSpec, rng: np.random.Generator, shape: tuple[int, ...]
) -> np.ndarray:
    """Draw i.i.d. EMI vectors with covariance A_r sigma_r^2 R.

    The result has shape ``shape + (N,)``; each index combination is an
    independent symbol. Zero EMI power short-circuits to zeros.
    """
    n = spec.R.shape[0]
    if spec.sigma_r2 == 0.0:
        return np.zeros(shape + (n,), dtype=complex)
    return sample_cn(rng, psd_factor(spec.covariance), shape)
