"""File formats: trace and trajectory JSON Lines, report and truth JSON.

Every writer is deterministic (sorted keys, fixed separators), so identical
inputs produce byte-identical files.  Readers report the offending line
number for malformed JSONL.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Optional, Union

import numpy as np

from .alignment import CostSpace
from .errors import InvalidInputError
from .matching import MatchConfig, PairDecision, RejectionReason
from .model import ActivityLabel, MagneticSample, MatchReport, Thresholds, Trace, Trajectory

PathLike = Union[str, Path]


def _dump_line(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _parse_line(path: Path, lineno: int, line: str) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"{path}:{lineno}: malformed JSON line: {e.msg}") from None
    if not isinstance(obj, dict):
        raise InvalidInputError(f"{path}:{lineno}: expected a JSON object")
    return obj


def _require(path: Path, lineno: int, obj: dict, key: str):
    if key not in obj:
        raise InvalidInputError(f"{path}:{lineno}: missing field {key!r}")
    return obj[key]


def write_trace(path: PathLike, trace: Trace) -> None:
    """Header line with device metadata, then one sample per line."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(
            _dump_line(
                {"device_id": trace.device_id, "clock_offset_ms": trace.clock_offset_ms}
            )
        )
        for s in trace.samples:
            fh.write(
                _dump_line(
                    {
                        "t_ms": s.t_ms,
                        "mx": s.mx,
                        "my": s.my,
                        "mz": s.mz,
                        "activity": s.activity.value,
                    }
                )
            )


def read_trace(path: PathLike) -> Trace:
    path = Path(path)
    device_id: Optional[str] = None
    clock_offset_ms = 0
    samples: list[MagneticSample] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            obj = _parse_line(path, lineno, line)
            if lineno == 1:
                device_id = str(_require(path, lineno, obj, "device_id"))
                clock_offset_ms = int(_require(path, lineno, obj, "clock_offset_ms"))
                continue
            try:
                samples.append(
                    MagneticSample(
                        t_ms=int(_require(path, lineno, obj, "t_ms")),
                        mx=float(_require(path, lineno, obj, "mx")),
                        my=float(_require(path, lineno, obj, "my")),
                        mz=float(_require(path, lineno, obj, "mz")),
                        activity=ActivityLabel.parse(
                            str(_require(path, lineno, obj, "activity"))
                        ),
                    )
                )
            except InvalidInputError as e:
                raise InvalidInputError(f"{path}:{lineno}: {e}") from None
    if device_id is None:
        raise InvalidInputError(f"{path}:1: missing header line")
    return Trace(device_id=device_id, clock_offset_ms=clock_offset_ms, samples=tuple(samples))


def write_trajectory(path: PathLike, traj: Trajectory) -> None:
    """Header line with id/start/rate, then one {"v": ...} per value."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(
            _dump_line(
                {
                    "trace_id": traj.trace_id,
                    "start_ms": traj.start_ms,
                    "sample_rate_hz": traj.sample_rate_hz,
                }
            )
        )
        for v in traj.values:
            fh.write(_dump_line({"v": float(v)}))


def read_trajectory(path: PathLike) -> Trajectory:
    path = Path(path)
    header: Optional[dict] = None
    values: list[float] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            obj = _parse_line(path, lineno, line)
            if lineno == 1:
                header = {
                    "trace_id": str(_require(path, lineno, obj, "trace_id")),
                    "start_ms": int(_require(path, lineno, obj, "start_ms")),
                    "sample_rate_hz": float(_require(path, lineno, obj, "sample_rate_hz")),
                }
                continue
            values.append(float(_require(path, lineno, obj, "v")))
    if header is None:
        raise InvalidInputError(f"{path}:1: missing header line")
    try:
        return Trajectory(values=np.array(values), **header)
    except InvalidInputError as e:
        raise InvalidInputError(f"{path}: {e}") from None


def write_ground_truth(path: PathLike, pairs: Iterable[tuple[str, str]]) -> None:
    doc = {"coloc_pairs": [sorted(p) for p in pairs]}
    doc["coloc_pairs"].sort()
    Path(path).write_text(
        json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def read_ground_truth(path: PathLike) -> set[tuple[str, str]]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if "coloc_pairs" not in doc:
        raise InvalidInputError(f"{path}: missing coloc_pairs")
    return {tuple(sorted(map(str, p))) for p in doc["coloc_pairs"]}


def _config_dict(config: MatchConfig) -> dict:
    return {
        "decimation_factor": config.decimation_factor,
        "band": config.band,
        "score_space": config.score_space.value,
        "ignore_timestamps": config.ignore_timestamps,
    }


def _thresholds_dict(thresholds: Thresholds) -> dict:
    return {
        "max_temporal_offset_s": thresholds.max_temporal_offset_s,
        "max_compression_rate": thresholds.max_compression_rate,
        "max_ddtw_score": thresholds.max_ddtw_score,
    }


def report_document(
    decisions: Iterable[PairDecision],
    thresholds: Thresholds,
    config: MatchConfig,
) -> dict:
    pairs = []
    for d in decisions:
        r = d.report
        pairs.append(
            {
                "a": r.trajectory_a,
                "b": r.trajectory_b,
                "temporal_offset_s": r.temporal_offset_s,
                "compression_rate": r.compression_rate,
                "ddtw_score": r.ddtw_score,
                "accepted": r.accepted,
                "rejection_reasons": [reason.value for reason in d.rejection_reasons],
            }
        )
    return {
        "pairs": pairs,
        "thresholds": _thresholds_dict(thresholds),
        "config": _config_dict(config),
    }


def write_match_report(
    path: PathLike,
    decisions: Iterable[PairDecision],
    thresholds: Thresholds,
    config: MatchConfig,
) -> None:
    doc = report_document(decisions, thresholds, config)
    Path(path).write_text(
        json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def read_match_report(path: PathLike) -> tuple[list[PairDecision], Thresholds, MatchConfig]:
    """Rebuild decisions from a report file.

    Warp paths are not serialized, so reconstructed reports carry none.
    """
    path = Path(path)
    doc = json.loads(path.read_text(encoding="utf-8"))
    for key in ("pairs", "thresholds", "config"):
        if key not in doc:
            raise InvalidInputError(f"{path}: missing {key!r}")
    t = doc["thresholds"]
    thresholds = Thresholds(
        max_temporal_offset_s=float(t["max_temporal_offset_s"]),
        max_compression_rate=float(t["max_compression_rate"]),
        max_ddtw_score=float(t["max_ddtw_score"]),
    )
    c = doc["config"]
    config = MatchConfig(
        decimation_factor=int(c["decimation_factor"]),
        band=None if c["band"] is None else int(c["band"]),
        score_space=CostSpace(c["score_space"]),
        ignore_timestamps=bool(c["ignore_timestamps"]),
    )
    decisions = []
    for entry in doc["pairs"]:
        reasons = tuple(RejectionReason(v) for v in entry["rejection_reasons"])
        score = entry["ddtw_score"]
        report = MatchReport(
            trajectory_a=str(entry["a"]),
            trajectory_b=str(entry["b"]),
            temporal_offset_s=float(entry["temporal_offset_s"]),
            compression_rate=float(entry["compression_rate"]),
            ddtw_score=None if score is None else float(score),
            temporal_ok=RejectionReason.TEMPORAL_OFFSET not in reasons,
            compression_ok=RejectionReason.COMPRESSION_RATE not in reasons,
            score_ok=None if score is None else RejectionReason.DDTW_SCORE not in reasons,
            accepted=bool(entry["accepted"]),
        )
        decisions.append(PairDecision(report=report, rejection_reasons=reasons))
    return decisions, thresholds, config


def write_warp_paths(path: PathLike, entries: Iterable[tuple[str, str, object]]) -> None:
    """(id_a, id_b, WarpPath) triples as a JSON document for plotting."""
    doc = {
        "paths": [
            {"a": a, "b": b, "pairs": [[int(i), int(j)] for i, j in wp.pairs]}
            for a, b, wp in entries
        ]
    }
    Path(path).write_text(
        json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
