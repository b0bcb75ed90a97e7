"""Pilot assignment and MMSE estimation of the aggregated channels.

UEs share tau_p orthogonal pilots round-robin, so co-pilot UEs contaminate
each other's observations. The estimator operates on the pilot-projected
signal and needs only the aggregated moments, the EMI-plus-noise
covariance, and the UE LoS phases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from riscf.channel import ChannelRealization, ChannelStatistics
from riscf.emi import EmiNoiseCovariance
from riscf.linalg import solve_hermitian


@dataclass(frozen=True)
class PilotAssignment:
    """Round-robin pilot indices and the induced co-pilot cosets."""

    n_ues: int
    tau_p: int
    pilot_of: np.ndarray
    cosets: tuple[np.ndarray, ...]

    def coset(self, ue: int) -> np.ndarray:
        """UEs sharing UE ``ue``'s pilot, itself included."""
        return self.cosets[int(self.pilot_of[ue])]


def assign_pilots(n_ues: int, tau_p: int) -> PilotAssignment:
    """Deterministic round-robin assignment: UE k uses pilot k mod tau_p."""
    if n_ues < 1:
        raise ValueError("n_ues must be >= 1")
    if tau_p < 1:
        raise ValueError("tau_p must be >= 1")
    pilot_of = np.arange(n_ues) % tau_p
    cosets = tuple(np.flatnonzero(pilot_of == t) for t in range(tau_p))
    return PilotAssignment(n_ues=n_ues, tau_p=tau_p, pilot_of=pilot_of, cosets=cosets)


@dataclass(frozen=True)
class EstimationStatistics:
    """Second-order quantities of the MMSE estimator, per (AP, UE).

    psi is the pilot observation covariance divided by tau_p, omega the
    estimate shape matrix, c the error covariance, and gain the estimator
    matrix sqrt(p_hat_k) R^o Psi^{-1} applied to the innovation.
    """

    psi: np.ndarray
    omega: np.ndarray
    c: np.ndarray
    gain: np.ndarray


def estimation_statistics(
    stats: ChannelStatistics,
    emi_cov: EmiNoiseCovariance,
    assignment: PilotAssignment,
    pilot_powers: np.ndarray,
    tau_p: int,
    noise_power: float,
) -> EstimationStatistics:
    """Build Psi, Omega, C, and the estimator gain for every (AP, UE) pair.

    Psi_mk = sum_{i in P_k} p_hat_i tau_p R^o_mi + R_mm + sigma^2 I is
    shared within a coset; Omega = R^o Psi^{-1} R^o and C = R^o -
    p_hat tau_p Omega follow. Solves are linear (no explicit inverses) and
    refuse ill-conditioned Psi.
    """
    n_aps, n_ues, l, _ = stats.r_o.shape
    eye = np.eye(l)
    psi = np.empty_like(stats.r_o)
    for coset in assignment.cosets:
        if coset.size == 0:
            continue
        contaminated = np.einsum(
            "i,miab->mab", pilot_powers[coset] * tau_p, stats.r_o[:, coset]
        )
        psi_coset = contaminated + emi_cov.r_mm + noise_power * eye
        psi[:, coset] = psi_coset[:, None]

    x = solve_hermitian(psi, stats.r_o)
    omega = stats.r_o @ x
    c = stats.r_o - pilot_powers[None, :, None, None] * tau_p * omega
    gain = np.sqrt(pilot_powers)[None, :, None, None] * x.conj().swapaxes(-1, -2)
    return EstimationStatistics(psi=psi, omega=omega, c=c, gain=gain)


def synthesize_pilot_observation(
    realization: ChannelRealization,
    emi_pilot: np.ndarray,
    ap_noise: np.ndarray,
    assignment: PilotAssignment,
    pilot_powers: np.ndarray,
    phi: np.ndarray,
) -> np.ndarray:
    """Pilot-projected received signal y^p_mk for a batch of realizations.

    ``emi_pilot`` has shape (trials, N, tau_p) and ``ap_noise`` (trials, M,
    L, tau_p), one column per pilot symbol. With unit-norm-squared-tau_p
    orthogonal pilots, projecting on pilot t scales the co-pilot channels
    by sqrt(p_hat) tau_p and the per-symbol noises by sqrt(tau_p).
    """
    tau_p = assignment.tau_p
    trials, n_aps, n_ues, l = realization.o.shape
    reflected = np.einsum(
        "tmna,n,tnp->tmap", realization.h.conj(), phi, emi_pilot
    )
    noise = np.sqrt(tau_p) * (reflected + ap_noise)
    y = np.empty((trials, n_aps, n_ues, l), dtype=complex)
    for t, coset in enumerate(assignment.cosets):
        if coset.size == 0:
            continue
        signal = np.einsum(
            "i,tmia->tma", np.sqrt(pilot_powers[coset]) * tau_p, realization.o[:, :, coset]
        )
        y[:, :, coset] = (signal + noise[..., t])[:, :, None, :]
    return y


def mmse_estimate(
    y: np.ndarray,
    stats: ChannelStatistics,
    est: EstimationStatistics,
    assignment: PilotAssignment,
    pilot_powers: np.ndarray,
    phase: np.ndarray,
) -> np.ndarray:
    """MMSE estimates o_hat_mk given the pilot observations and LoS phases.

    o_hat = obar e^{j theta_k} + gain (y - ybar), where ybar collects the
    phase-rotated LoS means of the whole coset.
    """
    tau_p = assignment.tau_p
    ybar = np.einsum(
        "i,mia,ti,ki->tmka",
        np.sqrt(pilot_powers) * tau_p,
        stats.obar,
        phase,
        _coset_mask(assignment),
    )
    prior = stats.obar[None] * phase[:, None, :, None]
    return prior + np.einsum("mkab,tmkb->tmka", est.gain, y - ybar)


def _coset_mask(assignment: PilotAssignment) -> np.ndarray:
    """0/1 matrix whose (k, i) entry flags i in P_k."""
    return (
        assignment.pilot_of[:, None] == assignment.pilot_of[None, :]
    ).astype(float)
