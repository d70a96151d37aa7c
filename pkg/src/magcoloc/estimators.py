"""Estimator-style wrappers over the functional pipeline.

These follow the fit/transform/predict conventions so the pipeline slots
into existing tooling (grid search over thresholds, cloning, param
introspection).  All heavy lifting stays in the functional modules.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .alignment import CostSpace
from .errors import InvalidInputError
from .matching import MatchConfig, PairDecision, match_users
from .model import Thresholds, Trace, Trajectory
from .segmentation import SegmentationConfig, segment
from .signal import DEFAULT_SMOOTH_WINDOW, apply_clock_offset


class TrajectoryExtractor(TransformerMixin, BaseEstimator):
    """Trace-to-trajectories preprocessing step.

    ``transform`` maps each Trace to the list of journey trajectories found
    in it (clock correction, magnitude, smoothing, segmentation).  Stateless;
    ``fit`` only records how many traces it saw.
    """

    def __init__(
        self,
        smooth_window: int = DEFAULT_SMOOTH_WINDOW,
        min_vehicle_duration_s: float = 60.0,
        activity_debounce_s: float = 10.0,
        apply_offset: bool = True,
    ):
        self.smooth_window = smooth_window
        self.min_vehicle_duration_s = min_vehicle_duration_s
        self.activity_debounce_s = activity_debounce_s
        self.apply_offset = apply_offset

    def fit(self, X: Iterable[Trace], y=None):
        self.n_traces_seen_ = sum(1 for _ in X)
        return self

    def transform(self, X: Iterable[Trace]) -> list[list[Trajectory]]:
        config = SegmentationConfig(
            min_vehicle_duration_s=self.min_vehicle_duration_s,
            activity_debounce_s=self.activity_debounce_s,
        )
        out = []
        for trace in X:
            if self.apply_offset:
                trace = apply_clock_offset(trace)
            out.append(segment(trace, config, smooth_window=self.smooth_window))
        return out


class CoLocationMatcher(BaseEstimator):
    """Decides which trajectory pairs rode the same vehicle carriage.

    ``fit`` stores one user's trajectories as the reference side;
    ``match`` evaluates the cross product against another user's, and
    ``predict`` reduces that to one boolean per input trajectory
    (co-located with at least one reference trajectory).
    """

    def __init__(
        self,
        max_temporal_offset_s: float = 5.0,
        max_compression_rate: float = 1.5,
        max_ddtw_score: float = 5.0,
        decimation_factor: int = 10,
        band: Optional[int] = None,
        score_space: str = "derivative",
        ignore_timestamps: bool = False,
        prefilter: bool = True,
    ):
        self.max_temporal_offset_s = max_temporal_offset_s
        self.max_compression_rate = max_compression_rate
        self.max_ddtw_score = max_ddtw_score
        self.decimation_factor = decimation_factor
        self.band = band
        self.score_space = score_space
        self.ignore_timestamps = ignore_timestamps
        self.prefilter = prefilter

    def _thresholds(self) -> Thresholds:
        return Thresholds(
            max_temporal_offset_s=self.max_temporal_offset_s,
            max_compression_rate=self.max_compression_rate,
            max_ddtw_score=self.max_ddtw_score,
        )

    def _config(self) -> MatchConfig:
        try:
            space = CostSpace(self.score_space)
        except ValueError:
            raise InvalidInputError(
                f"score_space must be 'derivative' or 'raw', got {self.score_space!r}"
            ) from None
        return MatchConfig(
            decimation_factor=self.decimation_factor,
            band=self.band,
            score_space=space,
            ignore_timestamps=self.ignore_timestamps,
        )

    def fit(self, X: Sequence[Trajectory], y=None):
        ref = list(X)
        if not ref:
            raise InvalidInputError("need at least one reference trajectory")
        self.reference_ = ref
        return self

    def match(self, X: Sequence[Trajectory]) -> list[PairDecision]:
        if not hasattr(self, "reference_"):
            raise InvalidInputError("matcher is not fitted")
        return match_users(
            self.reference_,
            list(X),
            thresholds=self._thresholds(),
            config=self._config(),
            prefilter=self.prefilter,
        )

    def predict(self, X: Sequence[Trajectory]) -> np.ndarray:
        X = list(X)
        accepted_ids = {
            d.report.trajectory_b for d in self.match(X) if d.report.accepted
        }
        return np.array([t.trace_id in accepted_ids for t in X], dtype=bool)
