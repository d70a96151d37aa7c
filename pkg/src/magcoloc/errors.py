"""Exception types raised by the library.

Everything derives from ``ValueError`` so callers that do not care about
the distinction can catch the builtin.
"""


class InvalidInputError(ValueError):
    """Input violates a documented precondition (non-finite values, bad
    arguments, unsorted timestamps, mismatched lengths)."""


class SequenceTooShortError(InvalidInputError):
    """A time series is shorter than the operation requires."""


class InfeasibleBandError(InvalidInputError):
    """A warp-path band constraint is narrower than the length difference
    of the two sequences, so no valid path exists."""


class OracleSizeExceededError(InvalidInputError):
    """The exhaustive alignment oracle was asked to enumerate paths for
    sequences beyond its size guard."""


class DegenerateSeriesError(InvalidInputError):
    """A series has zero variance, so variance-normalised statistics are
    undefined.  Raised distinctly so callers can flag flat, bus-like
    trajectories."""
