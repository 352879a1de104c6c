"""EPR-steering bounds, protocol simulation, and counting statistics.

The package computes tight steering bounds for finite measurement
schemes, evaluates the protocol for honest and dishonest senders, and
simulates the photon-counting experiment end to end (Poisson sampling,
estimators with error bars, maximum-likelihood tomography).
"""

from .bounds import SteeringBound, analytic_bound, steering_bound, verify_tightness
from .errors import DomainError, EstimationError, InternalError
from .experiment import (
    CountTable,
    Estimate,
    bootstrap_steering_error,
    chsh_settings,
    estimate_chsh,
    estimate_steering,
    exact_counts,
    full_pipeline,
    outcome_probabilities,
    sample_counts,
    steering_settings,
    substream_seed,
)
from .geometry import (
    FIGURES,
    SUPPORTED_SETTINGS,
    DirectionSet,
    MeasurementScheme,
    custom_scheme,
    dual_directions,
    scheme_axes,
    vertex_directions,
)
from .linalg import (
    FIDELITY_CONVENTION,
    as_density_matrix,
    eig_hermitian,
    fidelity,
    kron,
    partial_trace,
    pauli_along,
)
from .protocol import (
    ChshReport,
    LhsEnsemble,
    OPTIMAL_ENSEMBLE_KIND,
    SteeringReport,
    cheat_steering,
    chsh_max,
    chsh_value,
    correlation,
    correlation_matrix,
    honest_steering,
    make_ensemble,
)
from .states import (
    BELL_LOCAL_LIMIT,
    REGIMES,
    LocalCorrection,
    StateCharacter,
    classify,
    depolarize_one_sided,
    find_local_correction,
    linear_entropy,
    prepare_via_gate,
    state_character,
    tangle,
    werner,
)
from .tomography import tomography, tomography_settings

__version__ = "0.1.0"

__all__ = [
    "BELL_LOCAL_LIMIT",
    "ChshReport",
    "CountTable",
    "DirectionSet",
    "DomainError",
    "Estimate",
    "EstimationError",
    "FIDELITY_CONVENTION",
    "FIGURES",
    "InternalError",
    "LhsEnsemble",
    "LocalCorrection",
    "MeasurementScheme",
    "OPTIMAL_ENSEMBLE_KIND",
    "REGIMES",
    "StateCharacter",
    "SteeringBound",
    "SteeringReport",
    "SUPPORTED_SETTINGS",
    "analytic_bound",
    "as_density_matrix",
    "bootstrap_steering_error",
    "cheat_steering",
    "chsh_max",
    "chsh_settings",
    "chsh_value",
    "classify",
    "correlation",
    "correlation_matrix",
    "custom_scheme",
    "depolarize_one_sided",
    "dual_directions",
    "eig_hermitian",
    "estimate_chsh",
    "estimate_steering",
    "exact_counts",
    "fidelity",
    "find_local_correction",
    "full_pipeline",
    "honest_steering",
    "kron",
    "linear_entropy",
    "make_ensemble",
    "outcome_probabilities",
    "partial_trace",
    "pauli_along",
    "prepare_via_gate",
    "sample_counts",
    "scheme_axes",
    "state_character",
    "steering_bound",
    "steering_settings",
    "substream_seed",
    "tangle",
    "tomography",
    "tomography_settings",
    "verify_tightness",
    "vertex_directions",
    "werner",
]
