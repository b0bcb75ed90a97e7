"""Uplink simulator for RIS-aided cell-free massive MIMO under EMI.

The package computes closed-form spectral-efficiency expressions for the
uplink of a cell-free massive MIMO system assisted by a reconfigurable
intelligent surface (RIS) subject to electromagnetic interference (EMI),
validates them against an independent Monte-Carlo oracle, and implements
fractional and max-min power control.
"""

from riscf.config import SystemConfig
from riscf.scenario import Scenario, generate_scenario, path_loss_db, rician_factor
from riscf.correlation import (
    RisCorrelation,
    ApCorrelation,
    LosComponents,
    NlosCovariances,
    ris_sinc_correlation,
    gaussian_local_scattering,
    los_components,
    nlos_covariances,
)
from riscf.channel import (
    ChannelStatistics,
    ChannelRealization,
    aggregated_covariance,
    sample_channels,
)
from riscf.emi import (
    EmiSpec,
    EmiNoiseCovariance,
    sigma_r2_from_rho,
    emi_noise_covariance,
    sample_emi,
)
from riscf.estimation import (
    PilotAssignment,
    EstimationStatistics,
    assign_pilots,
    estimation_statistics,
    synthesize_pilot_observation,
    mmse_estimate,
)
from riscf.pipeline import LinkStatistics, build_link_statistics
from riscf.se import (
    SinrTerms,
    LsfdWeights,
    SeResult,
    build_sinr_terms,
    sinr_lsfd_closed_form,
    sinr_equal_weights,
    optimal_lsfd_weights,
    spectral_efficiency,
)
from riscf.montecarlo import OracleEstimate, UatfEstimates, estimate_uatf_terms, sinr_from_estimates
from riscf.power import PowerAllocation, fractional_power_control, maxmin_power_control

__version__ = "0.1.0"
