"""Command line entry point.

Subcommands:
  run    -- execute one experiment, writing report.json/fronts.csv/iterations.csv
  oracle -- exact Pareto front of a small model (same CSV schema as fronts)
  gen    -- write a builtin benchmark model as a JSON model file
  hv     -- hypervolume table for exported front CSVs

Exit codes: 0 success, 2 configuration error, 3 model error, 4 statistical
abort (an expected-reward run exceeded the step limit).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import benchmarks, geometry, oracle, runner
from .algorithms import ALGORITHMS, ConfigError, ExperimentConfig, PRESETS
from .benchmarks import ModelFormatError, builtin_model, load_model
from .heuristics import Rule
from .model import Direction, validate_mdp
from .stats import SimulationTruncatedError

EXIT_CONFIG = 2
EXIT_MODEL = 3
EXIT_STATISTICAL = 4


def _load_bundle(spec: str) -> benchmarks.ModelBundle:
    path = Path(spec)
    if path.suffix == ".json" or path.exists():
        return load_model(path)
    return builtin_model(spec)


def _parse_reference(text):
    try:
        parts = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad reference point {text!r}; expected 'x,y'")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("reference point must have two coordinates")
    return tuple(parts)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mosmc",
        description="Multi-objective statistical model checking of MDPs "
                    "via lightweight strategy sampling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment")
    run.add_argument("--model", required=True,
                     help="model file or builtin spec (mr, exponential:D, "
                          "deep-sea-det[:toy|tiny|classic], deep-sea-prob[:...], "
                          "racetrack-corridor, racetrack-shortcut)")
    run.add_argument("--query", default="default", help="named query in the model file")
    run.add_argument("--algorithm", required=True, choices=ALGORITHMS)
    run.add_argument("--heuristic", default="simple", choices=[r.value for r in Rule])
    run.add_argument("--preset", choices=sorted(PRESETS), help="table configuration preset")
    run.add_argument("-m", type=int, help="initial / per-batch strategy count")
    run.add_argument("-n", type=int, help="per-strategy run count (fixed budget)")
    run.add_argument("-I", "--iterations", type=int, help="iteration count")
    run.add_argument("--alpha", type=float, help="total statistical error budget")
    run.add_argument("--epsilon", type=float, help="target precision (incremental)")
    run.add_argument("--batch-factor", type=float, help="batch budget factor f (incremental)")
    run.add_argument("--strategy-seed", type=int, default=1)
    run.add_argument("--sim-seed", type=int, default=0)
    run.add_argument("--step-limit", type=int, default=10_000)
    run.add_argument("--timeout", type=float, help="wall-clock stop (incremental)")
    run.add_argument("--max-batches", type=int, help="batch-count stop (incremental)")
    run.add_argument("--max-runs", type=int, help="run-count stop (incremental)")
    run.add_argument("--reference", type=_parse_reference, help="hypervolume reference 'x,y'")
    run.add_argument("--out-dir", default="out", help="directory for report.json and CSVs")
    run.add_argument("--workers", type=int, default=1)

    orc = sub.add_parser("oracle", help="exact Pareto front by strategy enumeration")
    orc.add_argument("--model", required=True)
    orc.add_argument("--query", default="default")
    orc.add_argument("--cap", type=int, default=oracle.DEFAULT_ENUMERATION_CAP)
    orc.add_argument("--out", help="front CSV path (default: print only)")

    gen = sub.add_parser("gen", help="write a builtin model to a JSON file")
    gen.add_argument("--model", required=True, help="builtin spec, e.g. exponential:3")
    gen.add_argument("--out", required=True)

    hv = sub.add_parser("hv", help="hypervolume table for front CSVs")
    hv.add_argument("--reference", type=_parse_reference, required=True)
    hv.add_argument("--max-dims", default="max,max",
                    help="objective directions as 'max,min' etc.")
    hv.add_argument("fronts", nargs="+", help="front CSV files")
    return parser


def _cmd_run(args) -> int:
    bundle = _load_bundle(args.model)
    if args.query not in bundle.queries:
        print(f"error: model has no query named {args.query!r}", file=sys.stderr)
        return EXIT_MODEL
    query = bundle.queries[args.query]
    report = validate_mdp(bundle.mdp, query)
    if not report.ok:
        print("error: invalid model:", "; ".join(report.violations), file=sys.stderr)
        return EXIT_MODEL
    for warning in report.warnings:
        print("warning:", warning, file=sys.stderr)
    config = ExperimentConfig(algorithm=args.algorithm, heuristic=Rule.from_string(args.heuristic))
    if args.preset:
        config = config.with_preset(args.preset)
    overrides = {
        "m": args.m, "n": args.n, "iterations": args.iterations, "alpha": args.alpha,
        "epsilon": args.epsilon, "batch_factor": args.batch_factor,
        "strategy_seed": args.strategy_seed, "simulation_seed": args.sim_seed,
        "step_limit": args.step_limit, "timeout": args.timeout,
        "max_batches": args.max_batches, "max_runs": args.max_runs,
        "reference_point": args.reference, "workers": args.workers,
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(config, key, value)
    config.validate()
    result = runner.run_experiment(config, bundle.mdp, query)
    runner.write_outputs(result, args.out_dir, bundle.mdp.name)
    hv_text = ("" if result.hypervolume_under is None
               else f", hypervolume {result.hypervolume_under:.6g}")
    print(f"{result.algorithm} on {bundle.mdp.name}: {result.total_runs} runs, "
          f"{len(result.under_front.corners)} front corner(s){hv_text} "
          f"[{result.wall_clock:.2f} s]")
    for warning in result.warnings:
        print("warning:", warning, file=sys.stderr)
    print(f"outputs written to {args.out_dir}/")
    return 0


def _cmd_oracle(args) -> int:
    bundle = _load_bundle(args.model)
    query = bundle.queries[args.query]
    front = oracle.exact_pareto_front(bundle.mdp, query, cap=args.cap)
    approx = geometry.FrontApproximation(
        "exact", front.dirs, front.corners,
        tuple(oracle.strategy_rank(bundle.mdp, w) for w in front.witnesses),
    )
    for corner, witness in zip(front.corners, front.witnesses):
        print(f"({corner[0]:.9g}, {corner[1]:.9g})  strategy {list(witness)}")
    if args.out:
        geometry.write_front_csv(args.out, [approx])
        print(f"front written to {args.out}")
    return 0


def _cmd_gen(args) -> int:
    bundle = builtin_model(args.model)
    benchmarks.save_model(bundle, args.out)
    print(f"{bundle.mdp.name}: {bundle.mdp.n_states} states -> {args.out}")
    return 0


def _cmd_hv(args) -> int:
    dirs = tuple(Direction(d.strip().lower()) for d in args.max_dims.split(","))
    fronts = []
    labels = []
    for path in args.fronts:
        for front in geometry.read_front_csv(path, dirs):
            fronts.append(front)
            labels.append(f"{path} ({front.kind})")
    rows, mean = runner.hv_report(fronts, args.reference)
    for i, hv in rows:
        print(f"{labels[i]}: hypervolume {hv:.9g}")
    print(f"mean: {mean:.9g}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "oracle":
            return _cmd_oracle(args)
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "hv":
            return _cmd_hv(args)
        raise AssertionError(args.command)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationTruncatedError as exc:
        print(f"statistical abort: {exc}", file=sys.stderr)
        return EXIT_STATISTICAL
    except (ModelFormatError, oracle.EnumerationCapError, oracle.IllFormedObjectiveError,
            FileNotFoundError) as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
