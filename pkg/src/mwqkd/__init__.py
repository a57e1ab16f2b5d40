"""Simulator and composable security analysis for a microwave
continuous-variable QKD link built from displaced squeezed states.

Quadrature variances are dimensionless with the vacuum at 0.25.
"""

from .config import (
    CHAIN_PRESETS,
    DEFAULT_CHANNEL_LOSS,
    DEFAULT_N_RAW,
    RUN1_CHAIN,
    RUN2_CHAIN,
    ExperimentConfig,
    config_from_dict,
    load_config,
)
from .devices import (
    ChannelParams,
    DeviceChainParams,
    ReadoutModel,
    bob_output_distribution,
    codebook_variance,
    efficiency_to_noise,
    level_to_variance,
    response_and_noise,
    trusted_readout_constants,
)
from .errors import InsufficientDataError, PhysicalityError
from .gaussian import (
    VACUUM_VARIANCE,
    GaussianState,
    apply_beamsplitter,
    apply_loss,
    apply_phase_sensitive_amp,
    apply_squeeze,
    condition_on_classical_gaussian,
    displace,
    make_thermal,
    make_vacuum,
    partial_trace,
    symplectic_eigenvalues,
    tensor,
    two_mode_squeezed_thermal,
    von_neumann_entropy,
)
from .linkbudget import (
    CRYO_LINK,
    MEDIA,
    OPEN_AIR,
    MediumSpec,
    distance_limit,
    distance_to_loss,
    loss_to_distance,
    max_tolerable_loss,
    raw_key_rate,
    sweep_occupancy,
    thermal_occupancy,
)
from .protocol import (
    ChannelEstimate,
    Codebook,
    KeyRecord,
    estimate_channel,
    generate_codebook,
    key_manifest,
    read_key_records,
    sift,
    simulate_transmission,
    write_key_records,
)
from .security import (
    CompositeKeyBound,
    SecurityReport,
    asymptotic_key,
    build_report,
    composite_key,
    confidence_w,
    finite_size_delta,
    holevo_dr,
    mutual_information,
    noise_crossing,
    noise_tolerance,
    predicted_estimate,
    snr,
    worst_case_params,
)
from .stats import (
    Histogram,
    bhattacharyya,
    bhattacharyya_gaussian,
    bootstrap_mi_sigma,
    build_histogram,
    empirical_mutual_information,
    gaussian_bin_probabilities,
    hellinger,
    hellinger_from_coefficient,
    histogram_vs_gaussian,
)

__version__ = "0.1.0"

__all__ = [
    "CHAIN_PRESETS",
    "CRYO_LINK",
    "DEFAULT_CHANNEL_LOSS",
    "DEFAULT_N_RAW",
    "MEDIA",
    "OPEN_AIR",
    "RUN1_CHAIN",
    "RUN2_CHAIN",
    "VACUUM_VARIANCE",
    "ChannelEstimate",
    "ChannelParams",
    "Codebook",
    "CompositeKeyBound",
    "DeviceChainParams",
    "ExperimentConfig",
    "GaussianState",
    "Histogram",
    "InsufficientDataError",
    "KeyRecord",
    "MediumSpec",
    "PhysicalityError",
    "ReadoutModel",
    "SecurityReport",
    "apply_beamsplitter",
    "apply_loss",
    "apply_phase_sensitive_amp",
    "apply_squeeze",
    "asymptotic_key",
    "bhattacharyya",
    "bhattacharyya_gaussian",
    "bob_output_distribution",
    "bootstrap_mi_sigma",
    "build_histogram",
    "build_report",
    "codebook_variance",
    "composite_key",
    "condition_on_classical_gaussian",
    "confidence_w",
    "config_from_dict",
    "displace",
    "distance_limit",
    "distance_to_loss",
    "efficiency_to_noise",
    "empirical_mutual_information",
    "estimate_channel",
    "finite_size_delta",
    "gaussian_bin_probabilities",
    "generate_codebook",
    "hellinger",
    "hellinger_from_coefficient",
    "histogram_vs_gaussian",
    "holevo_dr",
    "key_manifest",
    "level_to_variance",
    "load_config",
    "loss_to_distance",
    "make_thermal",
    "make_vacuum",
    "max_tolerable_loss",
    "mutual_information",
    "noise_crossing",
    "noise_tolerance",
    "partial_trace",
    "predicted_estimate",
    "raw_key_rate",
    "read_key_records",
    "response_and_noise",
    "sift",
    "simulate_transmission",
    "snr",
    "sweep_occupancy",
    "symplectic_eigenvalues",
    "tensor",
    "thermal_occupancy",
    "trusted_readout_constants",
    "two_mode_squeezed_thermal",
    "von_neumann_entropy",
    "worst_case_params",
    "write_key_records",
]
