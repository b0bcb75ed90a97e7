"""Aggregated channel statistics and joint channel sampling.

The aggregated channel o_mk = g_mk + H_m^H Phi z_k combines the direct
AP-UE link with the RIS cascade. Its LoS mean and covariance feed the
estimator and the closed-form SINR; the sampler draws joint realizations
for the Monte-Carlo oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from riscf.correlation import LosComponents, NlosCovariances
from riscf.linalg import psd_factor, quadratic_block_trace, sample_cn, sample_phases


@dataclass(frozen=True)
class ChannelStatistics:
    """First and second moments of the aggregated channels.

    obar is the LoS mean (M, K, L); r_o the aggregated covariance
    (M, K, L, L); q1 and q2 its two RIS-to-AP NLoS contributions;
    r_direct the direct-link covariance R_mk.
    """

    obar: np.ndarray
    r_o: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    r_direct: np.ndarray


@dataclass(frozen=True)
class ChannelRealization:
    """A batch of joint channel draws with leading trial axis."""

    g: np.ndarray
    h: np.ndarray
    z: np.ndarray
    o: np.ndarray
    phase: np.ndarray

    def __post_init__(self) -> None:
        if self.o.shape != self.g.shape:
            raise ValueError("o and g must share shape")


def aggregated_covariance(
    r_direct: np.ndarray, los: LosComponents, nlos: NlosCovariances
) -> ChannelStatistics:
    """Mean and covariance of o_mk from the link statistics.

    The covariance is R_mk + Hbar^H Phi Rtilde_k Phi^H Hbar + Q1 + Q2,
    where Q1 carries the NLoS RIS-to-AP response to the LoS RIS-to-UE
    direction and Q2 the response to the NLoS RIS-to-UE covariance; both
    are block traces against rtilde_m.
    """
    n_aps, n, l = los.hbar.shape
    n_ues = los.zbar.shape[0]
    obar = np.einsum("mna,n,kn->mka", los.hbar.conj(), los.phi, los.zbar)

    g_phase = los.phi.conj()[None, :, None] * los.hbar
    cascade = np.einsum("mna,knp,mpb->mkab", g_phase.conj(), nlos.rtilde_k, g_phase)

    phi_z = los.phi[None, :] * los.zbar
    b_k = phi_z[:, :, None] * phi_z.conj()[:, None, :]
    phi_rk = np.einsum("n,knp,p->knp", los.phi, nlos.rtilde_k, los.phi.conj())

    q1 = np.empty((n_aps, n_ues, l, l), dtype=complex)
    q2 = np.empty((n_aps, n_ues, l, l), dtype=complex)
    for m in range(n_aps):
        for k in range(n_ues):
            q1[m, k] = quadratic_block_trace(b_k[k], nlos.rtilde_m[m], n, l)
            q2[m, k] = quadratic_block_trace(phi_rk[k], nlos.rtilde_m[m], n, l)

    return ChannelStatistics(
        obar=obar, r_o=r_direct + cascade + q1 + q2, q1=q1, q2=q2, r_direct=r_direct
    )


class ChannelSampler:
    """Draws joint (g, H, z, o) batches from precomputed covariance factors."""

    def __init__(
        self,
        stats: ChannelStatistics,
        los: LosComponents,
        nlos: NlosCovariances,
    ) -> None:
        self.los = los
        self.n_aps, self.n, self.l = los.hbar.shape
        self.n_ues = los.zbar.shape[0]
        self.g_factors = [
            [psd_factor(stats.r_direct[m, k]) for k in range(self.n_ues)]
            for m in range(self.n_aps)
        ]
        self.h_factors = [psd_factor(nlos.rtilde_m[m]) for m in range(self.n_aps)]
        self.z_factors = [psd_factor(nlos.rtilde_k[k]) for k in range(self.n_ues)]

    def draw(
        self, rng: np.random.Generator, trials: int, phase: np.ndarray | None = None
    ) -> ChannelRealization:
        """Sample ``trials`` joint realizations.

        The UE LoS phase factors e^{j theta_k} are drawn fresh unless given.
        Draw order is fixed (phases, g, H, z) so a seeded stream reproduces
        the batch bit-for-bit.
        """
        if phase is None:
            phase = sample_phases(rng, (trials, self.n_ues))
        g = np.empty((trials, self.n_aps, self.n_ues, self.l), dtype=complex)
        for m in range(self.n_aps):
            for k in range(self.n_ues):
                g[:, m, k, :] = sample_cn(rng, self.g_factors[m][k], (trials,))
        h = np.empty((trials, self.n_aps, self.n, self.l), dtype=complex)
        for m in range(self.n_aps):
            vec = sample_cn(rng, self.h_factors[m], (trials,))
            h[:, m] = self.los.hbar[m] + vec.reshape(trials, self.l, self.n).transpose(
                0, 2, 1
            )
        z = np.empty((trials, self.n_ues, self.n), dtype=complex)
        for k in range(self.n_ues):
            z[:, k] = self.los.zbar[k] * phase[:, k, None] + sample_cn(
                rng, self.z_factors[k], (trials,)
            )
        o = g + np.einsum("tmna,n,tkn->tmka", h.conj(), self.los.phi, z)
        return ChannelRealization(g=g, h=h, z=z, o=o, phase=phase)


def sample_channels(
    stats: ChannelStatistics,
    los: LosComponents,
    nlos: NlosCovariances,
    rng: np.random.Generator,
    trials: int = 1,
) -> ChannelRealization:
    """One-shot joint channel draw; builds factors then samples a batch."""
    return ChannelSampler(stats, los, nlos).draw(rng, trials)
