"""Experiment orchestration: dispatch, default reference points, hypervolume
reporting, and stable on-disk outputs (report.json, fronts.csv,
iterations.csv).

report.json is byte-stable for identical configuration and seeds: keys are
sorted, floats use repr, and wall-clock time is kept out of the file (it is
printed separately), so determinism can be checked by comparing bytes.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict
from pathlib import Path

from . import geometry
from .algorithms import ExperimentConfig, ExperimentReport, run_algorithm
from .model import Direction, directions


def default_reference(stats_maps, dirs):
    """Component-wise worst pessimistic corner over all evaluated strategies.

    Dominated by every box corner, hence a valid hypervolume reference for
    any front built from these statistics. Hypervolumes computed against a
    derived reference are only comparable within one invocation.
    """
    worst = None
    for stats in stats_maps:
        for _sigma, box in sorted(stats.boxes().items()):
            corner = geometry.normalize(geometry.pessimistic_corner(box, dirs), dirs)
            if worst is None:
                worst = list(corner)
            else:
                worst = [min(w, c) for w, c in zip(worst, corner)]
    if worst is None:
        return None
    return geometry.normalize(tuple(worst), dirs)


def run_experiment(config: ExperimentConfig, model, query) -> ExperimentReport:
    """Run the configured algorithm and attach hypervolumes and timing."""
    t0 = time.monotonic()
    report = run_algorithm(config, model, query)
    dirs = directions(query)
    reference = config.reference_point
    if reference is None:
        reference = default_reference(report.all_stats(), dirs)
        if reference is not None:
            report.warnings.append(
                "reference point derived from the evaluated strategies; "
                "hypervolumes are comparable only within this invocation"
            )
    report.reference_point = tuple(reference) if reference is not None else None
    if reference is not None and not report.under_front.is_empty:
        report.hypervolume_under = geometry.hypervolume(report.under_front, reference)
        if report.over_front is not None and not report.over_front.is_empty:
            report.hypervolume_over = geometry.hypervolume(report.over_front, reference)
    report.wall_clock = time.monotonic() - t0
    return report


def hv_report(fronts, reference):
    """Hypervolume per front plus the average, e.g. across strategy seeds."""
    if not fronts:
        raise ValueError("no fronts given")
    rows = [(i, geometry.hypervolume(front, reference)) for i, front in enumerate(fronts)]
    mean = sum(hv for _i, hv in rows) / len(rows)
    return rows, mean


def _config_json(config: ExperimentConfig) -> dict:
    data = asdict(config)
    data["heuristic"] = config.heuristic.value
    data["reference_point"] = list(config.reference_point) if config.reference_point else None
    del data["workers"]  # execution knob; must not affect report bytes
    return data


def report_to_json(report: ExperimentReport, model_name: str = "") -> dict:
    """Deterministic JSON payload (excludes wall-clock time)."""
    def front_json(front):
        if front is None:
            return None
        return [
            {"dim1": c[0], "dim2": c[1], "strategy_id": s}
            for c, s in zip(front.corners, front.sources)
        ]

    strategies = {}
    for sigma, entry in sorted(report.stats.items()):
        box = entry.box
        strategies[str(sigma)] = {
            "runs": entry.runs_used,
            "means": list(box.means),
            "lowers": list(box.lowers),
            "uppers": list(box.uppers),
            "confidence": box.confidence,
            "methods": list(box.methods),
        }
    return {
        "algorithm": report.algorithm,
        "model": model_name,
        "config": _config_json(report.config),
        "reference_point": list(report.reference_point) if report.reference_point else None,
        "hypervolume_under": report.hypervolume_under,
        "hypervolume_over": report.hypervolume_over,
        "under_front": front_json(report.under_front),
        "over_front": front_json(report.over_front),
        "survivor_counts": report.survivor_counts,
        "final_candidates": report.final_candidates,
        "total_runs": report.total_runs,
        "heuristic_runs": report.heuristic_runs,
        "eval_runs": report.eval_runs,
        "unused_budget": report.unused_budget,
        "total_steps": report.total_steps,
        "batches": report.batches,
        "trajectory": [list(t) for t in report.trajectory],
        "warnings": report.warnings,
        "strategies": strategies,
    }


def write_outputs(report: ExperimentReport, out_dir, model_name: str = "") -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    payload = report_to_json(report, model_name)
    with open(out / "report.json", "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")
    fronts = [report.under_front]
    if report.over_front is not None:
        fronts.append(report.over_front)
    geometry.write_front_csv(out / "fronts.csv", fronts)
    with open(out / "iterations.csv", "w") as fh:
        if report.algorithm == "incremental":
            fh.write("completed_strategies,cumulative_runs\n")
            for runs, count in report.trajectory:
                fh.write(f"{count},{runs}\n")
        else:
            fh.write("iteration,strategies\n")
            for i, count in enumerate(report.survivor_counts, start=1):
                fh.write(f"{i},{count}\n")
