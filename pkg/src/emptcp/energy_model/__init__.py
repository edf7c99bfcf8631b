"""Radio profiles, per-byte transfer cost and the composite MPTCP energy model."""

from .fitting import (
    GammaRun,
    MeasurementSample,
    fit_gamma,
    fit_power_law,
    gamma_mse_curve,
    power_law_diagnostics,
    read_measurements,
)
from .model import (
    TransferEstimate,
    mptcp_energy,
    normalized_rmse,
    overlap_ratio,
    per_byte_cost,
    proportional_split,
    single_path_energy,
)
from .profiles import RadioProfile, default_profiles
from .radio import RadioStateMachine

__all__ = [
    "GammaRun", "MeasurementSample", "RadioProfile", "RadioStateMachine",
    "TransferEstimate", "default_profiles", "fit_gamma", "fit_power_law",
    "gamma_mse_curve", "mptcp_energy", "normalized_rmse", "overlap_ratio",
    "per_byte_cost", "power_law_diagnostics", "proportional_split",
    "read_measurements", "single_path_energy",
]
