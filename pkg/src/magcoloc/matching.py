"""Pairwise trajectory comparison and heuristic validation.

Pairs must pass three checks to count as co-located: start times within a
few seconds, similar lengths (compression rate), and a small normalized
alignment score.  The first two are cheap and run before the alignment so
most true negatives never pay the DP cost; this filtering is exact, not
approximate.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

from .alignment import AlignmentResult, CostSpace, ddtw
from .errors import InvalidInputError
from .model import MatchReport, Thresholds, Trajectory
from .signal import decimate


class RejectionReason(enum.Enum):
    TEMPORAL_OFFSET = "TemporalOffset"
    COMPRESSION_RATE = "CompressionRate"
    DDTW_SCORE = "DdtwScore"


@dataclass(frozen=True)
class PairDecision:
    """A match report plus the reasons the pair was rejected, if any."""

    report: MatchReport
    rejection_reasons: tuple[RejectionReason, ...]

    def __post_init__(self):
        if self.report.accepted != (len(self.rejection_reasons) == 0):
            raise InvalidInputError("accepted must match empty rejection_reasons")

    @property
    def accepted(self) -> bool:
        return self.report.accepted


@dataclass(frozen=True)
class MatchConfig:
    """Knobs for a matching run.

    ``ignore_timestamps`` disables the temporal criterion so acceptance
    depends only on compression rate and score (useful when clocks are not
    trusted or for stress-testing the shape-based criteria alone).
    """

    decimation_factor: int = 10
    band: Optional[int] = None
    score_space: CostSpace = CostSpace.DERIVATIVE
    ignore_timestamps: bool = False

    def __post_init__(self):
        if self.decimation_factor < 1:
            raise InvalidInputError(
                f"decimation_factor must be >= 1, got {self.decimation_factor}"
            )


def compression_rate(len_a: int, len_b: int) -> float:
    """Ratio of the longer to the shorter trajectory length; always >= 1."""
    if len_a < 1 or len_b < 1:
        raise InvalidInputError("trajectory lengths must be >= 1")
    return max(len_a, len_b) / min(len_a, len_b)


def temporal_offset(a: Trajectory, b: Trajectory) -> float:
    """Absolute difference of the trajectories' start times, in seconds."""
    return abs(a.start_ms - b.start_ms) / 1000.0


def _decide(
    a: Trajectory,
    b: Trajectory,
    thresholds: Thresholds,
    offset_s: float,
    rate: float,
    alignment: Optional[AlignmentResult],
    ignore_timestamps: bool,
) -> PairDecision:
    temporal_ok = True if ignore_timestamps else offset_s < thresholds.max_temporal_offset_s
    compression_ok = rate <= thresholds.max_compression_rate
    if alignment is None:
        score = None
        score_ok = None
        path = None
    else:
        score = alignment.normalized_score
        score_ok = score <= thresholds.max_ddtw_score
        path = alignment.path
    accepted = temporal_ok and compression_ok and score_ok is True
    reasons = []
    if not temporal_ok:
        reasons.append(RejectionReason.TEMPORAL_OFFSET)
    if not compression_ok:
        reasons.append(RejectionReason.COMPRESSION_RATE)
    if score_ok is False:
        reasons.append(RejectionReason.DDTW_SCORE)
    report = MatchReport(
        trajectory_a=a.trace_id,
        trajectory_b=b.trace_id,
        temporal_offset_s=offset_s,
        compression_rate=rate,
        ddtw_score=score,
        temporal_ok=temporal_ok,
        compression_ok=compression_ok,
        score_ok=score_ok,
        accepted=accepted,
        warp_path=path,
    )
    return PairDecision(report=report, rejection_reasons=tuple(reasons))


def validate_pair(
    a: Trajectory,
    b: Trajectory,
    alignment: AlignmentResult,
    thresholds: Thresholds = Thresholds(),
) -> PairDecision:
    """Apply all three heuristics to a pair whose alignment is already known.

    ``alignment`` must have been computed on exactly (a, b); a mismatched
    path shape is rejected.
    """
    if alignment.path.end != (a.n, b.n):
        raise InvalidInputError(
            f"alignment path ends at {alignment.path.end}, "
            f"but trajectories have lengths ({a.n}, {b.n})"
        )
    return _decide(
        a,
        b,
        thresholds,
        offset_s=temporal_offset(a, b),
        rate=compression_rate(a.n, b.n),
        alignment=alignment,
        ignore_timestamps=False,
    )


def match_users(
    user_a: Sequence[Trajectory],
    user_b: Sequence[Trajectory],
    thresholds: Thresholds = Thresholds(),
    config: MatchConfig = MatchConfig(),
    prefilter: bool = True,
) -> list[PairDecision]:
    """Compare every trajectory of one user against every trajectory of the
    other and decide co-location for each pair.

    Each pair is evaluated exactly once (the relation is symmetric, so the
    reverse direction is unnecessary).  With ``prefilter`` the temporal and
    compression checks run first and skip the alignment for pairs they
    reject; the accepted set is identical either way.  Output order is
    deterministic: sorted by trajectory ids.
    """
    sorted_a = sorted(user_a, key=lambda t: t.trace_id)
    sorted_b = sorted(user_b, key=lambda t: t.trace_id)
    dec_a = [decimate(t, config.decimation_factor) for t in sorted_a]
    dec_b = [decimate(t, config.decimation_factor) for t in sorted_b]

    decisions: list[PairDecision] = []
    for ta in dec_a:
        for tb in dec_b:
            offset_s = temporal_offset(ta, tb)
            rate = compression_rate(ta.n, tb.n)
            temporal_ok = config.ignore_timestamps or offset_s < thresholds.max_temporal_offset_s
            compression_ok = rate <= thresholds.max_compression_rate
            if prefilter and not (temporal_ok and compression_ok):
                alignment = None
            else:
                alignment = ddtw(
                    ta.values, tb.values, band=config.band, score_space=config.score_space
                )
            decisions.append(
                _decide(
                    ta,
                    tb,
                    thresholds,
                    offset_s,
                    rate,
                    alignment,
                    config.ignore_timestamps,
                )
            )
    return decisions
