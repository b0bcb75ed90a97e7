"""Spatial correlation matrices and deterministic LoS components.

Covers the sinc-kernel RIS correlation, Gaussian local scattering at the
APs, the Kronecker covariance of the RIS-to-AP channel, the RIS-to-UE
covariance, and the steering-vector LoS terms.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from riscf.config import SystemConfig
from riscf.scenario import Scenario


@dataclass(frozen=True)
class RisCorrelation:
    """Sinc-kernel correlation of the RIS elements on their planar grid."""

    R: np.ndarray
    element_positions: np.ndarray
    element_area: float


@dataclass(frozen=True)
class ApCorrelation:
    """Local-scattering correlation of one AP array toward one azimuth."""

    R: np.ndarray
    theta: float
    asd: float


@dataclass(frozen=True)
class LosComponents:
    """Deterministic LoS parts of the cascaded link plus the RIS phases.

    hbar has shape (M, N, L), zbar (K, N), phi is the diagonal of the RIS
    phase-shift matrix.
    """

    hbar: np.ndarray
    zbar: np.ndarray
    theta_m: np.ndarray
    phi: np.ndarray


@dataclass(frozen=True)
class NlosCovariances:
    """NLoS covariances of the RIS links.

    rtilde_m stacks the NL x NL covariance of the column-major vectorized
    RIS-to-AP channel per AP; rtilde_k the N x N RIS-to-UE covariance per
    UE; r_r and r_m are the RIS-side and AP-side Kronecker factors.
    """

    rtilde_m: np.ndarray
    rtilde_k: np.ndarray
    r_r: np.ndarray
    r_m: np.ndarray


def ris_element_positions(n_h: int, n_v: int, d_h: float, d_v: float) -> np.ndarray:
    """Element centers on the RIS plane, row-major over the horizontal axis.

    Element x (0-based) sits at [0, (x mod N_H) d_H, floor(x / N_H) d_V]
    with spacings in meters; the surface occupies the y-z plane.
    """
    idx = np.arange(n_h * n_v)
    return np.column_stack(
        [np.zeros(idx.size), (idx % n_h) * d_h, (idx // n_h) * d_v]
    )


def ris_sinc_correlation(
    n_h: int, n_v: int, d_h: float, d_v: float, wavelength: float
) -> RisCorrelation:
    """Isotropic-scattering RIS correlation R[i,j] = sinc(2 d_ij / lambda).

    Spacings d_h, d_v are physical element sizes in meters; the element
    area A_r = d_h d_v follows from them.
    """
    u = ris_element_positions(n_h, n_v, d_h, d_v)
    dist = np.linalg.norm(u[:, None, :] - u[None, :, :], axis=-1)
    return RisCorrelation(
        R=np.sinc(2.0 * dist / wavelength),
        element_positions=u,
        element_area=d_h * d_v,
    )


@lru_cache(maxsize=None)
def _hermgauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.hermite.hermgauss(order)


def gaussian_local_scattering(
    beta_nlos: float,
    theta: float,
    sigma_phi: float,
    n_antennas: int,
    spacing: float,
) -> ApCorrelation:
    """ULA correlation under Gaussian angular deviation around theta.

    Entry (l, n) is beta_nlos E{exp(j 2 pi spacing (l - n) sin(theta + d))}
    with d ~ N(0, sigma_phi^2); spacing is in wavelengths and sigma_phi in
    radians. Evaluated by Gauss-Hermite quadrature with the order doubled
    until two successive results agree to 1e-9 relative (error beyond the
    order cap). Entries depend on l - n only, so one offset row suffices.
    """
    if sigma_phi <= 0.0:
        raise ValueError("sigma_phi must be positive")
    if beta_nlos == 0.0:
        zero = np.zeros((n_antennas, n_antennas), dtype=complex)
        return ApCorrelation(R=zero, theta=theta, asd=sigma_phi)

    offsets = np.arange(n_antennas)

    def quadrature(order: int) -> np.ndarray:
        nodes, weights = _hermgauss(order)
        angles = np.sin(theta + np.sqrt(2.0) * sigma_phi * nodes)
        phases = np.exp(2j * np.pi * spacing * offsets[:, None] * angles[None, :])
        return beta_nlos * (phases @ weights) / np.sqrt(np.pi)

    order = 30
    row = quadrature(order)
    while order <= 480:
        finer = quadrature(2 * order)
        if np.linalg.norm(finer - row) <= 1e-9 * np.linalg.norm(finer):
            row = finer
            break
        row, order = finer, 2 * order
    else:
        raise RuntimeError(
            f"local-scattering quadrature did not converge by order {order}"
        )

    l_idx = offsets[:, None] - offsets[None, :]
    matrix = np.where(l_idx >= 0, row[np.abs(l_idx)], np.conj(row[np.abs(l_idx)]))
    return ApCorrelation(R=matrix, theta=theta, asd=sigma_phi)


def los_components(
    scenario: Scenario, ris: RisCorrelation, config: SystemConfig
) -> LosComponents:
    """Steering-vector LoS terms of both RIS links and the RIS phase diagonal.

    The RIS-to-AP mean progresses linearly over the element index with the
    horizontal spacing and the azimuth of the AP seen from the RIS; the
    RIS-to-UE mean is the planar-array response toward the UE (or a flat
    all-ones profile when zbar_planar is off, a debugging aid).
    """
    n = config.n_ris_elements
    delta_ap = scenario.ap_positions[:, :2] - scenario.ris_position[:2]
    theta_m = np.arctan2(delta_ap[:, 1], delta_ap[:, 0])
    progression = np.exp(
        2j * np.pi * config.ris_spacing_h * np.arange(n)[None, :] * np.sin(theta_m)[:, None]
    )
    hbar = (
        np.sqrt(scenario.beta_m_los)[:, None, None]
        * progression[:, :, None]
        * np.ones((1, 1, config.n_ap_antennas))
    )

    if config.zbar_planar:
        towards_ue = scenario.ue_positions - scenario.ris_position[None, :]
        direction = towards_ue / np.linalg.norm(towards_ue, axis=1, keepdims=True)
        phase = (2.0 * np.pi / config.wavelength) * (
            ris.element_positions @ direction.T
        )
        zbar = np.sqrt(scenario.beta_k_los)[:, None] * np.exp(1j * phase.T)
    else:
        zbar = np.sqrt(scenario.beta_k_los)[:, None] * np.ones((1, n), dtype=complex)

    phi = np.full(n, np.exp(1j * config.ris_phase))
    return LosComponents(hbar=hbar, zbar=zbar, theta_m=theta_m, phi=phi)


def nlos_covariances(
    ris: RisCorrelation, scenario: Scenario, config: SystemConfig
) -> NlosCovariances:
    """NLoS covariance stacks for the RIS-to-AP and RIS-to-UE channels.

    The RIS-to-AP covariance is Kronecker: rtilde_m = (R_m^T kron R_r) /
    (L N beta_m) with the RIS-side factor R_r = beta_m^NLoS A_r R and a
    unit-trace-per-antenna AP-side factor R_m built from local scattering
    toward the RIS. The RIS-to-UE covariance is beta_k^NLoS A_r R.
    """
    m, l, n = config.n_aps, config.n_ap_antennas, config.n_ris_elements
    sigma_phi = np.deg2rad(config.asd_deg)
    a_r = ris.element_area

    delta_ris = scenario.ris_position[:2] - scenario.ap_positions[:, :2]
    theta_to_ris = np.arctan2(delta_ris[:, 1], delta_ris[:, 0])
    r_m = np.stack(
        [
            gaussian_local_scattering(
                1.0, float(theta_to_ris[i]), sigma_phi, l, config.ap_antenna_spacing
            ).R
            for i in range(m)
        ]
    )
    r_r = scenario.beta_m_nlos[:, None, None] * a_r * ris.R[None, :, :]
    rtilde_m = np.stack(
        [
            np.kron(r_m[i].T, r_r[i]) / (l * n * scenario.beta_m[i])
            for i in range(m)
        ]
    )
    rtilde_k = scenario.beta_k_nlos[:, None, None] * a_r * ris.R[None, :, :]
    return NlosCovariances(rtilde_m=rtilde_m, rtilde_k=rtilde_k, r_r=r_r, r_m=r_m)
