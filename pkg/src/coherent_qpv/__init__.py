"""
Coherent QPV Lab

Finite-size security thresholds, session simulation, intensity planning and
relativistic position inference for quantum position verification with
phase-randomized weak coherent states.
"""

__version__ = "1.0.0"
__author__ = "Coherent QPV Lab Team"

from .boolean_function import (
    Backend,
    BooleanFunction,
    boolean_fn_create,
    boolean_fn_eval,
)
from .config import RunConfig, RunConfigParser, parse_config
from .exceptions import (
    CapacityError,
    CausalityError,
    ConfigError,
    DomainError,
    OutputError,
    QPVError,
)
from .photon_stats import (
    ChannelModel,
    ClassProbs,
    Intensity,
    detection_prob,
    poisson_class_probs,
    sample_photon_number,
    sample_threshold_detection,
)
from .planner import (
    ProtocolParams,
    attack_resource_rate,
    honest_expected_score,
    honest_expected_tally,
    optimize_mu,
)
from .protocol import (
    AdversaryStrategy,
    RoundTally,
    TrialRecord,
    run_session,
    score_tally,
    verify,
)
from .report import Report, emit_report
from .security_bounds import (
    DEFAULT_COEFFICIENTS,
    ScoreCoefficients,
    SecurityParams,
    ThresholdReport,
    photon_class_bounds,
    threshold,
)
from .spacetime import (
    LatencyBudget,
    PositionRegion,
    TimingRecord,
    VerifierGeometry,
    latency_budget,
    position_region,
    radius_from_times,
    range_from_excess,
)

__all__ = [
    "AdversaryStrategy",
    "Backend",
    "BooleanFunction",
    "CapacityError",
    "CausalityError",
    "ChannelModel",
    "ClassProbs",
    "ConfigError",
    "DEFAULT_COEFFICIENTS",
    "DomainError",
    "Intensity",
    "LatencyBudget",
    "OutputError",
    "PositionRegion",
    "ProtocolParams",
    "QPVError",
    "Report",
    "RoundTally",
    "RunConfig",
    "RunConfigParser",
    "ScoreCoefficients",
    "SecurityParams",
    "ThresholdReport",
    "TimingRecord",
    "TrialRecord",
    "VerifierGeometry",
    "attack_resource_rate",
    "boolean_fn_create",
    "boolean_fn_eval",
    "detection_prob",
    "emit_report",
    "honest_expected_score",
    "honest_expected_tally",
    "latency_budget",
    "optimize_mu",
    "parse_config",
    "photon_class_bounds",
    "poisson_class_probs",
    "position_region",
    "radius_from_times",
    "range_from_excess",
    "run_session",
    "sample_photon_number",
    "sample_threshold_detection",
    "score_tally",
    "threshold",
    "verify",
]
