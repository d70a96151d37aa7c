"""Co-location detection from magnetometer trajectories.

Pipeline: raw 3-axis traces -> scalar magnitude -> trailing-average
smoothing -> activity-based journey segmentation -> derivative
dynamic-time-warping alignment -> three-heuristic pair validation.
Ships with a seeded synthetic journey generator for ground-truth
evaluation and a CLI (``magcoloc``) wiring the stages together.
"""

__version__ = "0.1.0"

from .alignment import (
    ORACLE_MAX_TOTAL_LENGTH,
    AlignmentResult,
    CostSpace,
    brute_force_align,
    ddtw,
    ddtw_distance,
    derivative_estimate,
    dtw,
    dtw_distance,
    euclidean_lockstep,
)
from .errors import (
    DegenerateSeriesError,
    InfeasibleBandError,
    InvalidInputError,
    OracleSizeExceededError,
    SequenceTooShortError,
)
from .estimators import CoLocationMatcher, TrajectoryExtractor
from .io import (
    read_ground_truth,
    read_match_report,
    read_trace,
    read_trajectory,
    report_document,
    write_ground_truth,
    write_match_report,
    write_trace,
    write_trajectory,
    write_warp_paths,
)
from .matching import (
    MatchConfig,
    PairDecision,
    RejectionReason,
    compression_rate,
    match_users,
    temporal_offset,
    validate_pair,
)
from .model import (
    FOOT_LABELS,
    ActivityLabel,
    MagneticSample,
    MatchReport,
    Thresholds,
    Trace,
    Trajectory,
    WarpPath,
)
from .segmentation import SegmentationConfig, segment
from .signal import (
    DEFAULT_SMOOTH_WINDOW,
    AutocorrelationSeries,
    apply_clock_offset,
    autocorrelation,
    decimate,
    magnitude,
    magnitudes,
    smooth,
)
from .synth import (
    Corpus,
    DeviceModel,
    FieldModel,
    JourneySpec,
    VehicleKind,
    generate_corpus,
    generate_field,
    generate_trace,
    journey_total_duration_s,
    vehicle_params,
)

__all__ = [
    "__version__",
    "ORACLE_MAX_TOTAL_LENGTH",
    "AlignmentResult",
    "CostSpace",
    "brute_force_align",
    "ddtw",
    "ddtw_distance",
    "derivative_estimate",
    "dtw",
    "dtw_distance",
    "euclidean_lockstep",
    "DegenerateSeriesError",
    "InfeasibleBandError",
    "InvalidInputError",
    "OracleSizeExceededError",
    "SequenceTooShortError",
    "CoLocationMatcher",
    "TrajectoryExtractor",
    "read_ground_truth",
    "read_match_report",
    "read_trace",
    "read_trajectory",
    "report_document",
    "write_ground_truth",
    "write_match_report",
    "write_trace",
    "write_trajectory",
    "write_warp_paths",
    "MatchConfig",
    "PairDecision",
    "RejectionReason",
    "compression_rate",
    "match_users",
    "temporal_offset",
    "validate_pair",
    "FOOT_LABELS",
    "ActivityLabel",
    "MagneticSample",
    "MatchReport",
    "Thresholds",
    "Trace",
    "Trajectory",
    "WarpPath",
    "SegmentationConfig",
    "segment",
    "DEFAULT_SMOOTH_WINDOW",
    "AutocorrelationSeries",
    "apply_clock_offset",
    "autocorrelation",
    "decimate",
    "magnitude",
    "magnitudes",
    "smooth",
    "Corpus",
    "DeviceModel",
    "FieldModel",
    "JourneySpec",
    "VehicleKind",
    "generate_corpus",
    "generate_field",
    "generate_trace",
    "journey_total_duration_s",
    "vehicle_params",
]
