"""Domain types shared by every stage of the pipeline.

All values are immutable after construction and validate their invariants
eagerly, so downstream code can assume well-formed data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .errors import InvalidInputError
from .validation import as_float_array


class ActivityLabel(Enum):
    """Per-sample activity classification, supplied by the recording device."""

    WALKING = "Walking"
    RUNNING = "Running"
    STILL = "Still"
    ON_FOOT = "OnFoot"
    ON_BICYCLE = "OnBicycle"
    IN_VEHICLE = "InVehicle"
    TILTING = "Tilting"
    UNKNOWN = "Unknown"

    @classmethod
    def parse(cls, text: str) -> "ActivityLabel":
        try:
            return cls(text)
        except ValueError:
            raise InvalidInputError(f"unknown activity label {text!r}") from None


# Labels that delimit a vehicle journey (boarding/alighting on foot).
FOOT_LABELS = frozenset({ActivityLabel.ON_FOOT, ActivityLabel.WALKING})


@dataclass(frozen=True, slots=True)
class MagneticSample:
    """One time-stamped 3-axis magnetometer reading plus activity label.

    Attributes:
        t_ms: epoch milliseconds (device-local until the clock offset is applied).
        mx, my, mz: magnetic flux density per axis, in microtesla.
        activity: activity label reported alongside the reading.
    """

    t_ms: int
    mx: float
    my: float
    mz: float
    activity: ActivityLabel

    def __post_init__(self):
        if self.t_ms < 0:
            raise InvalidInputError(f"t_ms must be >= 0, got {self.t_ms}")
        if not (math.isfinite(self.mx) and math.isfinite(self.my) and math.isfinite(self.mz)):
            raise InvalidInputError("magnetometer axes must be finite")
        if not isinstance(self.activity, ActivityLabel):
            raise InvalidInputError(f"activity must be an ActivityLabel, got {self.activity!r}")


@dataclass(frozen=True)
class Trace:
    """A device's raw recording: 3-axis samples plus its clock correction.

    ``clock_offset_ms`` is the signed correction to add to local timestamps
    to obtain synchronised time.
    """

    device_id: str
    clock_offset_ms: int
    samples: tuple[MagneticSample, ...]

    def __post_init__(self):
        if not self.device_id:
            raise InvalidInputError("device_id must be non-empty")
        object.__setattr__(self, "samples", tuple(self.samples))
        ts = [s.t_ms for s in self.samples]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise InvalidInputError("trace timestamps must be strictly increasing")

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A uniform-rate scalar-magnitude series for one vehicle journey.

    Attributes:
        trace_id: identifier of the journey (device id plus ordinal).
        start_ms: epoch milliseconds of the first value.
        sample_rate_hz: nominal rate of the values.
        values: scalar magnitudes in microtesla, all finite and >= 0.
    """

    trace_id: str
    start_ms: int
    sample_rate_hz: float
    values: np.ndarray

    def __post_init__(self):
        if not self.trace_id:
            raise InvalidInputError("trace_id must be non-empty")
        if not self.sample_rate_hz > 0:
            raise InvalidInputError(f"sample_rate_hz must be > 0, got {self.sample_rate_hz}")
        arr = as_float_array(self.values, "trajectory values")
        if arr.shape[0] < 2:
            raise InvalidInputError("a trajectory needs at least 2 values")
        if np.any(arr < 0):
            raise InvalidInputError("magnitudes are norms and must be >= 0")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def duration_s(self) -> float:
        return (self.n - 1) / self.sample_rate_hz

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trajectory):
            return NotImplemented
        return (
            self.trace_id == other.trace_id
            and self.start_ms == other.start_ms
            and self.sample_rate_hz == other.sample_rate_hz
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.trace_id, self.start_ms, self.sample_rate_hz, self.n))


@dataclass(frozen=True)
class WarpPath:
    """A monotone, continuous alignment between two trajectories.

    Pairs are 1-based: the first is (1, 1) and the last is (N, M) for
    sequences of length N and M.  Each step advances either index by 0 or 1,
    never both by 0.  Violating constructions are rejected.
    """

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((int(i), int(j)) for i, j in self.pairs))
        if not self.pairs:
            raise InvalidInputError("a warp path must contain at least one pair")
        if self.pairs[0] != (1, 1):
            raise InvalidInputError(f"warp path must start at (1, 1), got {self.pairs[0]}")
        for (i0, j0), (i1, j1) in zip(self.pairs, self.pairs[1:]):
            di, dj = i1 - i0, j1 - j0
            if di not in (0, 1) or dj not in (0, 1) or (di == 0 and dj == 0):
                raise InvalidInputError(
                    f"invalid warp step from ({i0}, {j0}) to ({i1}, {j1})"
                )

    @property
    def length(self) -> int:
        return len(self.pairs)

    @property
    def end(self) -> tuple[int, int]:
        """The (N, M) corner this path terminates at."""
        return self.pairs[-1]


@dataclass(frozen=True)
class Thresholds:
    """Acceptance thresholds for the three validation heuristics."""

    max_temporal_offset_s: float = 5.0
    max_compression_rate: float = 1.5
    max_ddtw_score: float = 5.0

    def __post_init__(self):
        for name in ("max_temporal_offset_s", "max_compression_rate", "max_ddtw_score"):
            if not getattr(self, name) > 0:
                raise InvalidInputError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class MatchReport:
    """Outcome of comparing one trajectory pair.

    ``ddtw_score`` and ``warp_path`` are None when cheap pre-filters rejected
    the pair before any alignment was computed; ``score_ok`` is then None as
    well.  ``accepted`` requires all three verdicts to be affirmative.
    """

    trajectory_a: str
    trajectory_b: str
    temporal_offset_s: float
    compression_rate: float
    ddtw_score: Optional[float]
    temporal_ok: bool
    compression_ok: bool
    score_ok: Optional[bool]
    accepted: bool
    warp_path: Optional[WarpPath] = field(default=None, repr=False)

    def __post_init__(self):
        if self.compression_rate < 1.0:
            raise InvalidInputError(
                f"compression_rate must be >= 1, got {self.compression_rate}"
            )
        if self.temporal_offset_s < 0:
            raise InvalidInputError("temporal_offset_s must be >= 0")
        if self.ddtw_score is not None and self.ddtw_score < 0:
            raise InvalidInputError("ddtw_score must be >= 0")
        if (self.ddtw_score is None) != (self.score_ok is None):
            raise InvalidInputError("score_ok must be present exactly when ddtw_score is")
        expected = self.temporal_ok and self.compression_ok and self.score_ok is True
        if self.accepted != expected:
            raise InvalidInputError("accepted must equal the conjunction of the verdicts")

    @property
    def heuristic_verdicts(self) -> tuple[bool, bool, Optional[bool]]:
        """(temporal, compression, score) verdicts; score is None if unevaluated."""
        return (self.temporal_ok, self.compression_ok, self.score_ok)
