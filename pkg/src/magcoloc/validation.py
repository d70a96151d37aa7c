"""Input validation helpers shared across the library."""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError, SequenceTooShortError


def as_float_array(values, name: str = "values") -> np.ndarray:
    """Coerce a 1-D sequence of scalars to a float64 array.

    Rejects empty, multi-dimensional and non-finite input.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise InvalidInputError(f"{name} must not be empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite values")
    return arr


def check_min_length(values: np.ndarray, min_length: int, name: str = "values") -> None:
    if values.shape[0] < min_length:
        raise SequenceTooShortError(
            f"{name} has {values.shape[0]} samples, need at least {min_length}"
        )


def check_finite_scalar(value: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value):
        raise InvalidInputError(f"{name} must be finite, got {value!r}")
    return value


def check_positive(value, name: str) -> None:
    if not value > 0:
        raise InvalidInputError(f"{name} must be strictly positive, got {value!r}")
