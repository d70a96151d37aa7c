"""Command-line front end: gen, segment, match, report.

Exit codes: 0 success, 2 usage or input error, 1 internal failure.
Diagnostics go to stderr; every command writes a run manifest next to its
outputs.  Manifests carry wall-clock duration and are the only non-
reproducible artifact; all data outputs are byte-deterministic.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

import click

from . import __version__
from .alignment import CostSpace, ddtw
from .errors import DegenerateSeriesError, InvalidInputError, SequenceTooShortError
from .io import (
    read_match_report,
    read_trace,
    read_trajectory,
    write_ground_truth,
    write_match_report,
    write_trace,
    write_trajectory,
    write_warp_paths,
)
from .matching import MatchConfig, match_users
from .model import Thresholds, Trajectory
from .segmentation import SegmentationConfig, segment
from .signal import DEFAULT_SMOOTH_WINDOW, apply_clock_offset, autocorrelation, decimate, magnitudes, smooth
from .synth import generate_corpus


@dataclass(frozen=True)
class RunManifest:
    """Provenance record written alongside every command's outputs."""

    command: str
    config: dict
    inputs: list[str]
    outputs: list[str]
    tool_version: str
    duration_s: float


def _write_manifest(
    out_dir: Path, command: str, config: dict, inputs: list[str], outputs: list[str], t0: float
) -> None:
    manifest = RunManifest(
        command=command,
        config=config,
        inputs=sorted(inputs),
        outputs=sorted(outputs),
        tool_version=__version__,
        duration_s=round(time.monotonic() - t0, 3),
    )
    path = out_dir / f"manifest_{command}.json"
    path.write_text(json.dumps(asdict(manifest), sort_keys=True, indent=2) + "\n")


def _usage(e: Exception) -> click.UsageError:
    return click.UsageError(str(e))


@click.group()
@click.version_option(version=__version__, prog_name="magcoloc")
def main():
    """Detect co-travelling passengers from magnetometer trajectories."""


@main.command()
@click.option("--users", type=int, default=4, show_default=True)
@click.option("--journeys", type=int, default=3, show_default=True)
@click.option("--coloc", type=float, default=0.5, show_default=True,
              help="Probability that a user pair shares each journey slot.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True)
def gen(users: int, journeys: int, coloc: float, seed: int, out: Path):
    """Generate a synthetic trace corpus with ground truth."""
    t0 = time.monotonic()
    try:
        corpus = generate_corpus(users, journeys, coloc, seed)
    except InvalidInputError as e:
        raise _usage(e)
    out.mkdir(parents=True, exist_ok=True)
    outputs = []
    for trace in corpus.traces:
        path = out / f"{trace.device_id}.jsonl"
        write_trace(path, trace)
        outputs.append(path.name)
    truth_path = out / "ground_truth.json"
    write_ground_truth(truth_path, corpus.coloc_pairs)
    outputs.append(truth_path.name)
    config = {"users": users, "journeys": journeys, "coloc": coloc, "seed": seed}
    _write_manifest(out, "gen", config, [], outputs, t0)
    click.echo(
        f"wrote {len(corpus.traces)} traces, {len(corpus.coloc_pairs)} true pairs -> {out}",
        err=True,
    )


@main.command(name="segment")
@click.argument("trace_files", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.option("--window", type=int, default=DEFAULT_SMOOTH_WINDOW, show_default=True,
              help="Trailing moving-average width, in samples.")
@click.option("--min-duration", type=float, default=60.0, show_default=True,
              help="Minimum vehicle episode length in seconds.")
@click.option("--debounce", type=float, default=10.0, show_default=True,
              help="Activity flickers shorter than this are absorbed.")
def segment_cmd(trace_files: tuple[Path, ...], out: Path, window: int,
                min_duration: float, debounce: float):
    """Extract per-journey trajectories from trace files."""
    t0 = time.monotonic()
    out.mkdir(parents=True, exist_ok=True)
    try:
        config = SegmentationConfig(
            min_vehicle_duration_s=min_duration, activity_debounce_s=debounce
        )
    except InvalidInputError as e:
        raise _usage(e)
    outputs = []
    for trace_path in trace_files:
        try:
            trace = apply_clock_offset(read_trace(trace_path))
            trajectories = segment(trace, config, smooth_window=window)
        except (InvalidInputError, OSError) as e:
            raise _usage(e)
        for traj in trajectories:
            path = out / f"{traj.trace_id.replace('#', '_')}.jsonl"
            write_trajectory(path, traj)
            outputs.append(path.name)
    flags = {"window": window, "min_duration": min_duration, "debounce": debounce}
    _write_manifest(out, "segment", flags, [p.name for p in trace_files], outputs, t0)
    click.echo(f"wrote {len(outputs)} trajectories -> {out}", err=True)


def _load_trajectory_dir(d: Path) -> list[Trajectory]:
    files = sorted(d.glob("*.jsonl"))
    if not files:
        raise _usage(InvalidInputError(f"no trajectory files in {d}"))
    try:
        return [read_trajectory(f) for f in files]
    except (InvalidInputError, OSError) as e:
        raise _usage(e)


def _parse_thresholds(text: str) -> Thresholds:
    parts = text.split(",")
    if len(parts) != 3:
        raise _usage(InvalidInputError(
            f"--thresholds wants three comma-separated numbers, got {text!r}"
        ))
    try:
        return Thresholds(
            max_temporal_offset_s=float(parts[0]),
            max_compression_rate=float(parts[1]),
            max_ddtw_score=float(parts[2]),
        )
    except (ValueError, InvalidInputError) as e:
        raise _usage(InvalidInputError(f"bad --thresholds: {e}"))


@main.command()
@click.argument("dir_a", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.argument("dir_b", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), required=True,
              help="Match report JSON path.")
@click.option("--thresholds", "thresholds_text", default="5,1.5,5", show_default=True,
              help="max temporal offset s, max compression rate, max score.")
@click.option("--decimate", "decimate_factor", type=int, default=10, show_default=True)
@click.option("--band", type=int, default=None,
              help="Warp corridor half-width in samples (unconstrained if omitted).")
@click.option("--score-space", type=click.Choice(["derivative", "raw"]),
              default="derivative", show_default=True)
@click.option("--ignore-timestamps", is_flag=True,
              help="Drop the temporal criterion; compare all pairs by shape alone.")
@click.option("--no-prefilter", is_flag=True,
              help="Align every pair even when cheap checks already reject it.")
@click.option("--emit-paths", is_flag=True,
              help="Also write warp paths (warp_paths.json) for plotting.")
def match(dir_a: Path, dir_b: Path, out: Path, thresholds_text: str,
          decimate_factor: int, band: Optional[int], score_space: str,
          ignore_timestamps: bool, no_prefilter: bool, emit_paths: bool):
    """Compare two users' trajectory directories and write a match report."""
    t0 = time.monotonic()
    thresholds = _parse_thresholds(thresholds_text)
    try:
        config = MatchConfig(
            decimation_factor=decimate_factor,
            band=band,
            score_space=CostSpace(score_space),
            ignore_timestamps=ignore_timestamps,
        )
    except InvalidInputError as e:
        raise _usage(e)
    side_a = _load_trajectory_dir(dir_a)
    side_b = _load_trajectory_dir(dir_b)
    try:
        decisions = match_users(
            side_a, side_b, thresholds, config, prefilter=not no_prefilter
        )
    except InvalidInputError as e:
        raise _usage(e)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_match_report(out, decisions, thresholds, config)
    outputs = [out.name]
    if emit_paths:
        paths_file = out.parent / "warp_paths.json"
        write_warp_paths(
            paths_file,
            [
                (d.report.trajectory_a, d.report.trajectory_b, d.report.warp_path)
                for d in decisions
                if d.report.warp_path is not None
            ],
        )
        outputs.append(paths_file.name)
    flags = {
        "thresholds": thresholds_text,
        "decimate": decimate_factor,
        "band": band,
        "score_space": score_space,
        "ignore_timestamps": ignore_timestamps,
        "no_prefilter": no_prefilter,
    }
    _write_manifest(out.parent, "match", flags,
                    [dir_a.name, dir_b.name], outputs, t0)
    n_acc = sum(d.report.accepted for d in decisions)
    click.echo(f"{len(decisions)} pairs evaluated, {n_acc} accepted -> {out}", err=True)


@main.command()
@click.argument("report_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--trajectories", "traj_dir", required=True,
              type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), required=True)
@click.option("--max-lag", type=int, default=200, show_default=True)
@click.option("--traces", "traces_dir", default=None,
              type=click.Path(exists=True, file_okay=False, path_type=Path),
              help="Raw trace dir; adds raw-vs-smoothed magnitude series.")
@click.option("--window", type=int, default=DEFAULT_SMOOTH_WINDOW, show_default=True,
              help="Smoothing width used for the raw-vs-smoothed series.")
def report(report_file: Path, traj_dir: Path, out: Path, max_lag: int,
           traces_dir: Optional[Path], window: int):
    """Export plot-ready CSV series for a finished matching run."""
    t0 = time.monotonic()
    try:
        decisions, thresholds, config = read_match_report(report_file)
    except (InvalidInputError, OSError, ValueError, KeyError) as e:
        raise _usage(InvalidInputError(f"unreadable report: {e}"))
    trajectories = {t.trace_id: t for t in _load_trajectory_dir(traj_dir)}
    referenced = sorted(
        {d.report.trajectory_a for d in decisions}
        | {d.report.trajectory_b for d in decisions}
    )
    dangling = [tid for tid in referenced if tid not in trajectories]
    if dangling:
        raise _usage(InvalidInputError(f"trajectory ids not found: {', '.join(dangling)}"))
    out.mkdir(parents=True, exist_ok=True)
    outputs = []

    scatter = out / "scatter.csv"
    with scatter.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["a", "b", "temporal_offset_s", "compression_rate", "ddtw_score", "accepted"])
        for d in decisions:
            r = d.report
            w.writerow([
                r.trajectory_a,
                r.trajectory_b,
                r.temporal_offset_s,
                r.compression_rate,
                "" if r.ddtw_score is None else r.ddtw_score,
                int(r.accepted),
            ])
    outputs.append(scatter.name)

    thresh_csv = out / "thresholds.csv"
    with thresh_csv.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["name", "value"])
        w.writerow(["max_temporal_offset_s", thresholds.max_temporal_offset_s])
        w.writerow(["max_compression_rate", thresholds.max_compression_rate])
        w.writerow(["max_ddtw_score", thresholds.max_ddtw_score])
    outputs.append(thresh_csv.name)

    acf_csv = out / "autocorrelation.csv"
    with acf_csv.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["trace_id", "lag", "coefficient", "note"])
        for tid in sorted(trajectories):
            traj = trajectories[tid]
            lag = min(max_lag, traj.n - 2)
            try:
                series = autocorrelation(traj.values, lag)
            except DegenerateSeriesError:
                w.writerow([tid, "", "", "degenerate: zero variance"])
                continue
            for l, c in zip(series.lags, series.coefficients):
                w.writerow([tid, l, c, ""])
    outputs.append(acf_csv.name)

    aligned_csv = out / "aligned_pairs.csv"
    with aligned_csv.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["a", "b", "step", "index_a", "index_b", "value_a_ut", "value_b_ut"])
        for d in decisions:
            r = d.report
            if not r.accepted:
                continue
            ta = decimate(trajectories[r.trajectory_a], config.decimation_factor)
            tb = decimate(trajectories[r.trajectory_b], config.decimation_factor)
            result = ddtw(ta.values, tb.values, band=config.band,
                          score_space=config.score_space)
            for step, (i, j) in enumerate(result.path.pairs):
                w.writerow([
                    r.trajectory_a, r.trajectory_b, step, i, j,
                    float(ta.values[i - 1]), float(tb.values[j - 1]),
                ])
    outputs.append(aligned_csv.name)

    if traces_dir is not None:
        for trace_path in sorted(traces_dir.glob("*.jsonl")):
            try:
                trace = read_trace(trace_path)
            except InvalidInputError as e:
                raise _usage(e)
            raw = magnitudes(trace.samples)
            try:
                smoothed = smooth(raw, window)
            except SequenceTooShortError:
                continue
            series_csv = out / f"smoothing_{trace.device_id}.csv"
            with series_csv.open("w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["index", "raw_ut", "smoothed_ut"])
                for i, v in enumerate(raw):
                    sm = "" if i < window else float(smoothed[i - window])
                    w.writerow([i, float(v), sm])
            outputs.append(series_csv.name)

    flags = {"max_lag": max_lag, "window": window,
             "traces": None if traces_dir is None else traces_dir.name}
    _write_manifest(out, "report", flags, [report_file.name, traj_dir.name], outputs, t0)
    click.echo(f"wrote {len(outputs)} plot files -> {out}", err=True)


if __name__ == "__main__":
    main()
