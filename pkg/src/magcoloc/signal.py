"""Scalar-magnitude reduction, smoothing, decimation and diagnostics.

All operations are pure functions; callers may parallelise freely across
traces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSeriesError, InvalidInputError, SequenceTooShortError
from .model import MagneticSample, Trace, Trajectory
from .validation import as_float_array

DEFAULT_SMOOTH_WINDOW = 10


def magnitude(sample: MagneticSample) -> float:
    """Euclidean norm of the 3-axis reading, in microtesla.

    Rotation-invariant, so the phone's orientation does not matter.
    """
    return float(np.sqrt(sample.mx**2 + sample.my**2 + sample.mz**2))


def magnitudes(samples) -> np.ndarray:
    """Vectorised :func:`magnitude` over an iterable of samples."""
    axes = np.array([(s.mx, s.my, s.mz) for s in samples], dtype=np.float64)
    if axes.size == 0:
        return np.empty(0)
    return np.sqrt(np.einsum("ij,ij->i", axes, axes))


def smooth(values, window: int = DEFAULT_SMOOTH_WINDOW) -> np.ndarray:
    """Trailing moving-average filter.

    Output element k (0-based) is the mean of the ``window`` raw values
    strictly before raw index ``k + window``; the current sample is excluded.
    The first ``window`` positions have no full history and are dropped, so
    the output has ``len(values) - window`` elements and its start time
    shifts forward by ``window`` sample periods (callers must propagate
    start_ms).
    """
    if window < 1:
        raise InvalidInputError(f"window must be >= 1, got {window}")
    arr = as_float_array(values)
    if arr.shape[0] <= window:
        raise SequenceTooShortError(
            f"need more than {window} values to smooth, got {arr.shape[0]}"
        )
    kernel = np.full(window, 1.0 / window)
    # 'valid' yields means of all length-`window` windows; the last one ends
    # at the final sample and has no output position, so it is dropped.
    return np.convolve(arr, kernel, mode="valid")[:-1]


def decimate(traj: Trajectory, factor: int) -> Trajectory:
    """Keep every ``factor``-th value starting from the first.

    The sample rate is divided by ``factor``; start_ms is unchanged.
    """
    if factor < 1:
        raise InvalidInputError(f"decimation factor must be >= 1, got {factor}")
    if factor == 1:
        return traj
    if traj.n < factor:
        raise InvalidInputError(
            f"trajectory has {traj.n} values, cannot decimate by {factor}"
        )
    return Trajectory(
        trace_id=traj.trace_id,
        start_ms=traj.start_ms,
        sample_rate_hz=traj.sample_rate_hz / factor,
        values=traj.values[::factor],
    )


def apply_clock_offset(trace: Trace) -> Trace:
    """Shift every timestamp by the trace's clock offset and zero the offset."""
    if trace.clock_offset_ms == 0:
        return trace
    off = trace.clock_offset_ms
    shifted = tuple(
        MagneticSample(s.t_ms + off, s.mx, s.my, s.mz, s.activity) for s in trace.samples
    )
    return Trace(device_id=trace.device_id, clock_offset_ms=0, samples=shifted)


@dataclass(frozen=True)
class AutocorrelationSeries:
    """Autocorrelation coefficients per lag; the lag-0 coefficient is 1."""

    lags: tuple[int, ...]
    coefficients: tuple[float, ...]

    def __post_init__(self):
        if len(self.lags) != len(self.coefficients):
            raise InvalidInputError("lags and coefficients must have equal length")
        if self.lags and self.lags[0] == 0 and self.coefficients[0] != 1.0:
            raise InvalidInputError("lag-0 coefficient must be exactly 1")


def autocorrelation(values, max_lag: int) -> AutocorrelationSeries:
    """Biased (denominator-N) autocorrelation for lags 0..max_lag.

    Raises :class:`DegenerateSeriesError` for constant series, the flat
    bus-like case where the statistic is undefined.
    """
    if max_lag < 1:
        raise InvalidInputError(f"max_lag must be >= 1, got {max_lag}")
    arr = as_float_array(values)
    n = arr.shape[0]
    if n <= max_lag + 1:
        raise SequenceTooShortError(
            f"need more than max_lag + 1 = {max_lag + 1} values, got {n}"
        )
    centered = arr - arr.mean()
    denom = float(np.dot(centered, centered))
    if denom == 0.0:
        raise DegenerateSeriesError("zero variance: constant series")
    coeffs = [1.0]
    for lag in range(1, max_lag + 1):
        coeffs.append(float(np.dot(centered[:-lag], centered[lag:])) / denom)
    return AutocorrelationSeries(
        lags=tuple(range(max_lag + 1)), coefficients=tuple(coeffs)
    )
