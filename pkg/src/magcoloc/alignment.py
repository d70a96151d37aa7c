"""Dynamic-programming alignment core.

Provides the lock-step Euclidean baseline, standard DTW, derivative DTW,
warp-path recovery, an optional Sakoe-Chiba style band constraint, and an
exhaustive path-enumeration oracle for verification.

The accumulation kernel is JIT-compiled; results are bit-deterministic.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import (
    InfeasibleBandError,
    InvalidInputError,
    OracleSizeExceededError,
    SequenceTooShortError,
)
from .model import WarpPath
from .validation import as_float_array

ORACLE_MAX_TOTAL_LENGTH = 16


class CostSpace(enum.Enum):
    """Which representation local costs are computed in."""

    RAW = "raw"
    DERIVATIVE = "derivative"


@dataclass(frozen=True)
class AlignmentResult:
    """Optimal alignment of two sequences.

    Attributes:
        distance: accumulated squared local cost along the optimal path.
        normalized_score: sum of absolute aligned-value differences (in the
            score space chosen by the caller) divided by the path length.
        path: the optimal warp path (1-based index pairs).
        cost_space: the space the DP ran in (raw values or derivatives).
    """

    distance: float
    normalized_score: float
    path: WarpPath
    cost_space: CostSpace


def derivative_estimate(values) -> np.ndarray:
    """Local slope estimate combining one backward difference and the
    centred two-point slope.

    For interior points::

        d[i] = ((v[i] - v[i-1]) + (v[i+1] - v[i-1]) / 2) / 2

    Endpoints copy their nearest interior neighbour, so the output has the
    same length as the input. Needs at least 3 values.
    """
    arr = as_float_array(values)
    if arr.shape[0] < 3:
        raise SequenceTooShortError(
            f"derivative estimate needs at least 3 values, got {arr.shape[0]}"
        )
    d = np.empty_like(arr)
    d[1:-1] = ((arr[1:-1] - arr[:-2]) + (arr[2:] - arr[:-2]) / 2.0) / 2.0
    d[0] = d[1]
    d[-1] = d[-2]
    return d


@njit(cache=True)
def _accumulate(a, b, band):  # pragma: no cover - exercised via wrappers
    """Fill the accumulated-cost matrix and backpointers.

    Local cost is the squared difference. Ties prefer the diagonal
    predecessor, then (i-1, j), making paths deterministic. ``band < 0``
    disables the corridor constraint; otherwise cell (i, j) is feasible
    iff |i * M / N - j| <= band.
    """
    n = a.shape[0]
    m = b.shape[0]
    acc = np.full((n, m), np.inf)
    back = np.full((n, m), -1, np.int8)
    for i in range(n):
        if band < 0:
            lo, hi = 0, m - 1
        else:
            center = i * m / n
            lo = int(np.ceil(center - band))
            hi = int(np.floor(center + band))
            if lo < 0:
                lo = 0
            if hi > m - 1:
                hi = m - 1
        for j in range(lo, hi + 1):
            diff = a[i] - b[j]
            cost = diff * diff
            if i == 0 and j == 0:
                acc[0, 0] = cost
                continue
            diag = acc[i - 1, j - 1] if (i > 0 and j > 0) else np.inf
            up = acc[i - 1, j] if i > 0 else np.inf
            left = acc[i, j - 1] if j > 0 else np.inf
            if diag <= up and diag <= left:
                prev, code = diag, 0
            elif up <= left:
                prev, code = up, 1
            else:
                prev, code = left, 2
            if prev == np.inf:
                continue
            acc[i, j] = prev + cost
            back[i, j] = code
    return acc, back


@njit(cache=True)
def _accumulate_two_row(a, b, band):  # pragma: no cover - exercised via wrappers
    """Distance-only accumulation keeping two rows; O(M) memory, no path."""
    n = a.shape[0]
    m = b.shape[0]
    prev_row = np.full(m, np.inf)
    cur_row = np.full(m, np.inf)
    for i in range(n):
        if band < 0:
            lo, hi = 0, m - 1
        else:
            center = i * m / n
            lo = int(np.ceil(center - band))
            hi = int(np.floor(center + band))
            if lo < 0:
                lo = 0
            if hi > m - 1:
                hi = m - 1
        cur_row[:] = np.inf
        for j in range(lo, hi + 1):
            diff = a[i] - b[j]
            cost = diff * diff
            if i == 0 and j == 0:
                cur_row[0] = cost
                continue
            diag = prev_row[j - 1] if (i > 0 and j > 0) else np.inf
            up = prev_row[j] if i > 0 else np.inf
            left = cur_row[j - 1] if j > 0 else np.inf
            if diag <= up and diag <= left:
                prev = diag
            elif up <= left:
                prev = up
            else:
                prev = left
            if prev == np.inf:
                continue
            cur_row[j] = prev + cost
        prev_row, cur_row = cur_row, prev_row
    return prev_row[m - 1]


def _check_band(n: int, m: int, band) -> int:
    if band is None:
        return -1
    band = int(band)
    if band < 1:
        raise InvalidInputError(f"band must be a positive integer, got {band}")
    if band < abs(n - m):
        raise InfeasibleBandError(
            f"band {band} is narrower than the length difference {abs(n - m)}"
        )
    return band


def _traceback(back: np.ndarray) -> WarpPath:
    i = back.shape[0] - 1
    j = back.shape[1] - 1
    rev = [(i, j)]
    while i > 0 or j > 0:
        code = back[i, j]
        if code == 0:
            i -= 1
            j -= 1
        elif code == 1:
            i -= 1
        elif code == 2:
            j -= 1
        else:  # unreachable cell; guarded by the feasibility check
            raise InfeasibleBandError("no feasible warp path under this band")
        rev.append((i, j))
    return WarpPath(pairs=tuple((i + 1, j + 1) for i, j in reversed(rev)))


def _score_along(path: WarpPath, xa: np.ndarray, xb: np.ndarray) -> float:
    ia = np.fromiter((p[0] - 1 for p in path.pairs), dtype=np.intp, count=path.length)
    ib = np.fromiter((p[1] - 1 for p in path.pairs), dtype=np.intp, count=path.length)
    return float(np.abs(xa[ia] - xb[ib]).sum() / path.length)


def _align(cost_a, cost_b, band, cost_space, score_a, score_b) -> AlignmentResult:
    band_val = _check_band(cost_a.shape[0], cost_b.shape[0], band)
    acc, back = _accumulate(cost_a, cost_b, band_val)
    distance = float(acc[-1, -1])
    if not np.isfinite(distance):
        raise InfeasibleBandError("no feasible warp path under this band")
    path = _traceback(back)
    return AlignmentResult(
        distance=distance,
        normalized_score=_score_along(path, score_a, score_b),
        path=path,
        cost_space=cost_space,
    )


def dtw(a, b, band: int | None = None) -> AlignmentResult:
    """Standard DTW with squared-difference local cost on raw values.

    Parameters
    ----------
    a, b:
        Scalar sequences, at least one value each.
    band:
        Optional corridor half-width; must be at least ``abs(len(a) - len(b))``.
        ``band >= max(len(a), len(b))`` reproduces the unconstrained result.
    """
    xa = as_float_array(a, "a")
    xb = as_float_array(b, "b")
    return _align(xa, xb, band, CostSpace.RAW, xa, xb)


def ddtw(
    a,
    b,
    band: int | None = None,
    score_space: CostSpace = CostSpace.DERIVATIVE,
) -> AlignmentResult:
    """Derivative DTW: DTW applied to local slope estimates.

    Constant offsets between the sequences do not affect the distance.
    ``score_space`` selects whether the normalized score sums absolute
    differences of derivatives (default) or of the raw values along the
    derivative-optimal path.
    """
    xa = as_float_array(a, "a")
    xb = as_float_array(b, "b")
    da = derivative_estimate(xa)
    db = derivative_estimate(xb)
    if score_space is CostSpace.DERIVATIVE:
        score_a, score_b = da, db
    else:
        score_a, score_b = xa, xb
    return _align(da, db, band, CostSpace.DERIVATIVE, score_a, score_b)


def dtw_distance(a, b, band: int | None = None) -> float:
    """Distance-only DTW using the two-row accumulator (no path recovery)."""
    xa = as_float_array(a, "a")
    xb = as_float_array(b, "b")
    band_val = _check_band(xa.shape[0], xb.shape[0], band)
    distance = float(_accumulate_two_row(xa, xb, band_val))
    if not np.isfinite(distance):
        raise InfeasibleBandError("no feasible warp path under this band")
    return distance


def ddtw_distance(a, b, band: int | None = None) -> float:
    """Distance-only derivative DTW using the two-row accumulator."""
    da = derivative_estimate(as_float_array(a, "a"))
    db = derivative_estimate(as_float_array(b, "b"))
    band_val = _check_band(da.shape[0], db.shape[0], band)
    distance = float(_accumulate_two_row(da, db, band_val))
    if not np.isfinite(distance):
        raise InfeasibleBandError("no feasible warp path under this band")
    return distance


def euclidean_lockstep(a, b) -> float:
    """Sum of squared differences between same-index points.

    The baseline alignment; it cannot handle sequences of different lengths
    and raises for them.
    """
    xa = as_float_array(a, "a")
    xb = as_float_array(b, "b")
    if xa.shape[0] != xb.shape[0]:
        raise InvalidInputError(
            f"lock-step comparison needs equal lengths, got {xa.shape[0]} and {xb.shape[0]}"
        )
    diff = xa - xb
    return float(np.dot(diff, diff))


def brute_force_align(a, b, cost_space: CostSpace = CostSpace.RAW) -> AlignmentResult:
    """Exhaustively enumerate every valid warp path and return the cheapest.

    A testing oracle, deliberately independent of the DP implementation.
    Guarded to ``len(a) + len(b) <= 16`` because enumeration is exponential.
    """
    xa = as_float_array(a, "a")
    xb = as_float_array(b, "b")
    if xa.shape[0] + xb.shape[0] > ORACLE_MAX_TOTAL_LENGTH:
        raise OracleSizeExceededError(
            f"oracle accepts at most {ORACLE_MAX_TOTAL_LENGTH} total values, "
            f"got {xa.shape[0] + xb.shape[0]}"
        )
    if cost_space is CostSpace.DERIVATIVE:
        va = derivative_estimate(xa)
        vb = derivative_estimate(xb)
    else:
        va, vb = xa, xb
    n, m = va.shape[0], vb.shape[0]
    best_cost = np.inf
    best_path: tuple[tuple[int, int], ...] = ()
    stack: list[tuple[int, int]] = []

    def walk(i: int, j: int, acc: float) -> None:
        nonlocal best_cost, best_path
        diff = va[i] - vb[j]
        acc = acc + diff * diff
        stack.append((i + 1, j + 1))
        if i == n - 1 and j == m - 1:
            if acc < best_cost:
                best_cost = acc
                best_path = tuple(stack)
        else:
            if i + 1 < n and j + 1 < m:
                walk(i + 1, j + 1, acc)
            if i + 1 < n:
                walk(i + 1, j, acc)
            if j + 1 < m:
                walk(i, j + 1, acc)
        stack.pop()

    walk(0, 0, 0.0)
    path = WarpPath(pairs=best_path)
    if cost_space is CostSpace.DERIVATIVE:
        score_a, score_b = va, vb
    else:
        score_a, score_b = xa, xb
    return AlignmentResult(
        distance=float(best_cost),
        normalized_score=_score_along(path, score_a, score_b),
        path=path,
        cost_space=cost_space,
    )
