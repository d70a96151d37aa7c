"""Split a full-day trace into per-journey trajectories.

A journey is a maximal in-vehicle span that is immediately preceded and
followed by an on-foot episode (boarding and alighting).  Short activity
flickers are debounced away first; Still/Tilting/Unknown inside a vehicle
span do not terminate it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidInputError
from .model import FOOT_LABELS, ActivityLabel, Trace, Trajectory
from .signal import DEFAULT_SMOOTH_WINDOW, magnitudes, smooth
from .validation import check_positive

# Labels that may occur inside a vehicle span without ending it.
_TOLERATED_IN_VEHICLE = frozenset(
    {ActivityLabel.IN_VEHICLE, ActivityLabel.STILL, ActivityLabel.TILTING, ActivityLabel.UNKNOWN}
)


@dataclass(frozen=True)
class SegmentationConfig:
    """Tuning knobs for journey extraction."""

    min_vehicle_duration_s: float = 60.0
    activity_debounce_s: float = 10.0

    def __post_init__(self):
        check_positive(self.min_vehicle_duration_s, "min_vehicle_duration_s")
        check_positive(self.activity_debounce_s, "activity_debounce_s")


@dataclass
class _Episode:
    label: ActivityLabel
    start: int  # sample index, inclusive
    stop: int  # sample index, exclusive
    t_first: int
    t_last: int

    @property
    def duration_s(self) -> float:
        return (self.t_last - self.t_first) / 1000.0


def _episodes(trace: Trace) -> list[_Episode]:
    out: list[_Episode] = []
    for idx, s in enumerate(trace.samples):
        if out and out[-1].label is s.activity:
            out[-1].stop = idx + 1
            out[-1].t_last = s.t_ms
        else:
            out.append(_Episode(s.activity, idx, idx + 1, s.t_ms, s.t_ms))
    return out


def _debounce(episodes: list[_Episode], debounce_s: float) -> list[_Episode]:
    """Absorb sub-debounce flickers into the preceding episode."""
    out: list[_Episode] = []
    for ep in episodes:
        if out and (ep.label is out[-1].label or ep.duration_s < debounce_s):
            out[-1].stop = ep.stop
            out[-1].t_last = ep.t_last
        else:
            out.append(ep)
    return out


def segment(
    trace: Trace,
    config: SegmentationConfig = SegmentationConfig(),
    smooth_window: int = DEFAULT_SMOOTH_WINDOW,
) -> list[Trajectory]:
    """Extract one smoothed, magnitude-reduced trajectory per journey.

    Expects the clock offset to have been applied already.  Returns
    trajectories ordered by start time; spans shorter than
    ``config.min_vehicle_duration_s`` (or too short to smooth) are dropped.
    A trace without any vehicle span yields an empty list.
    """
    ts = [s.t_ms for s in trace.samples]
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise InvalidInputError("trace timestamps must be strictly increasing")

    episodes = _debounce(_episodes(trace), config.activity_debounce_s)

    trajectories: list[Trajectory] = []
    k = 0
    while k < len(episodes):
        if episodes[k].label is not ActivityLabel.IN_VEHICLE:
            k += 1
            continue
        end = k
        while end + 1 < len(episodes) and episodes[end + 1].label in _TOLERATED_IN_VEHICLE:
            end += 1
        preceded = k > 0 and episodes[k - 1].label in FOOT_LABELS
        followed = end + 1 < len(episodes) and episodes[end + 1].label in FOOT_LABELS
        span = trace.samples[episodes[k].start : episodes[end].stop]
        duration_s = (span[-1].t_ms - span[0].t_ms) / 1000.0
        if preceded and followed and duration_s >= config.min_vehicle_duration_s:
            traj = _span_to_trajectory(
                span, f"{trace.device_id}#{len(trajectories)}", smooth_window
            )
            if traj is not None:
                trajectories.append(traj)
        k = end + 1
    return trajectories


def _span_to_trajectory(span, trace_id: str, smooth_window: int) -> Trajectory | None:
    n_raw = len(span)
    if n_raw - smooth_window < 2:
        return None
    span_ms = span[-1].t_ms - span[0].t_ms
    rate_hz = (n_raw - 1) * 1000.0 / span_ms
    values = smooth(magnitudes(span), smooth_window)
    period_ms = 1000.0 / rate_hz
    return Trajectory(
        trace_id=trace_id,
        start_ms=span[0].t_ms + round(smooth_window * period_ms),
        sample_rate_hz=rate_hz,
        values=values,
    )
