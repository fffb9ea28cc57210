"""Command-line entry point for reproducible assembly runs.

Subcommands: ``assemble`` (grow a combination toward a target file and
export trace/OBJ/voxels), ``benchmark`` (explicit-function curves for the
bo/random/greedy/oracle methods as CSV), ``dataset`` (generate, validate,
augment, stats, voxelize over JSONL files), and ``count`` (exhaustive
two- and three-brick combination counts).

Exit codes: 0 success, 1 usage or input error, 2 assembly saturation,
3 dataset validation failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import dataset as ds
from . import export
from .assembler import (
    METHODS,
    OBJECTIVES,
    AssemblyConfig,
    assemble,
    assemble_explicit,
    count_combinations,
)
from .bo import BoConfig
from .occupiability import TargetShape
from .stability import StabilityConfig

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SATURATED = 2
EXIT_INVALID = 3


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


def _apply_config_file(args: argparse.Namespace, parser: argparse.ArgumentParser, argv: list[str]) -> None:
    """Merge a JSON config file under explicit command-line flags."""
    if not getattr(args, "config", None):
        return
    try:
        doc = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read config file: {exc}")

    subparsers = parser._subparsers._group_actions[0].choices
    actions = subparsers[args.command]._actions
    by_dest = {a.dest: a.option_strings for a in actions}
    settable = set(by_dest) - {"help", "config", "command"}
    unknown = sorted(set(doc) - settable)
    if unknown:
        raise CliError(f"unknown config keys: {', '.join(unknown)}")
    for key, value in doc.items():
        explicit = any(opt in argv for opt in by_dest[key])
        if not explicit:
            setattr(args, key, value)


def _bo_config(args: argparse.Namespace) -> BoConfig:
    try:
        return BoConfig(
            v=args.initial_random,
            q=args.candidates,
            acq_samples=args.acq_samples,
            time_budget_s=args.time_budget,
            gamma0=args.gamma0,
            gamma1=args.gamma1,
            lambda_o_range=(args.lambda_o_min, args.lambda_o_max),
            lambda_s_range=(args.lambda_s_min, args.lambda_s_max),
        )
    except ValueError as exc:
        raise CliError(str(exc))


def _add_bo_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--initial-random", type=int, default=10, metavar="V",
                     help="random candidates seeding each step (default 10)")
    sub.add_argument("--candidates", type=int, default=20, metavar="Q",
                     help="total candidates observed per step (default 20)")
    sub.add_argument("--acq-samples", type=int, default=1000, metavar="Z",
                     help="feasible placements scored per acquisition (default 1000)")
    sub.add_argument("--time-budget", type=float, default=None, metavar="SECONDS",
                     nargs="?", const=1.0,
                     help="score as many placements as fit in this budget instead "
                          "(bare flag means 1 second)")
    sub.add_argument("--gamma0", type=float, default=1.0)
    sub.add_argument("--gamma1", type=float, default=1.0)
    sub.add_argument("--lambda-o-min", type=float, default=0.8)
    sub.add_argument("--lambda-o-max", type=float, default=0.9)
    sub.add_argument("--lambda-s-min", type=float, default=0.0)
    sub.add_argument("--lambda-s-max", type=float, default=0.1)


# ---------------------------------------------------------------------------
# assemble
# ---------------------------------------------------------------------------

def cmd_assemble(args: argparse.Namespace) -> int:
    if args.steps < 1:
        raise CliError("--steps must be >= 1")
    try:
        target = TargetShape.from_json(Path(args.target).read_text())
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise CliError(f"bad target file: {exc}")

    try:
        cfg = AssemblyConfig(
            steps=args.steps,
            rollback_window=args.rollback_window,
            rollback_threshold=args.rollback_threshold,
            rollback_mode=args.rollback_mode,
        )
    except ValueError as exc:
        raise CliError(str(exc))
    stab = StabilityConfig(perturbation=args.perturbation)

    trace = assemble(target, cfg, _bo_config(args), stab, seed=args.seed)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "trace.json").write_text(trace.to_json())
    (out / "final.obj").write_text(export.to_obj(trace.final))
    (out / "final.voxrle").write_text(export.to_voxels(trace.final, target.extents))
    covered = len(trace.final.occupied_cells() & target.cells)
    print(f"status: {trace.status}")
    print(f"bricks: {len(trace.final)}")
    print(f"coverage: {covered}/{len(target.cells)}")
    print(f"outputs: {out / 'trace.json'}, {out / 'final.obj'}, {out / 'final.voxrle'}")
    return EXIT_OK if trace.status == "completed" else EXIT_SATURATED


# ---------------------------------------------------------------------------
# benchmark
# ---------------------------------------------------------------------------

def _benchmark_job(job: tuple[str, str, int, int]) -> tuple[str, str, dict[int, list[float]]]:
    objective, method, steps, seed = job
    curves = assemble_explicit(objective, method, steps, [seed])
    return objective, method, curves


def cmd_benchmark(args: argparse.Namespace) -> int:
    objectives = list(OBJECTIVES) if args.objective == "all" else [args.objective]
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in METHODS:
            raise CliError(f"unknown method {m!r}")
    if args.steps < 1 or args.seeds < 1:
        raise CliError("--steps and --seeds must be >= 1")
    seeds = [args.seed + i for i in range(args.seeds)]

    jobs = []
    for objective in objectives:
        for method in methods:
            for seed in (seeds if method != "oracle" else [-1]):
                jobs.append((objective, method, args.steps, seed))

    results: dict[tuple[str, str], dict[int, list[float]]] = {}
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            for objective, method, curves in pool.map(_benchmark_job, jobs):
                results.setdefault((objective, method), {}).update(curves)
    else:
        for job in jobs:
            objective, method, curves = _benchmark_job(job)
            results.setdefault((objective, method), {}).update(curves)

    rows = ["method,objective,seed,step,value"]
    for objective in objectives:
        for method in methods:
            for seed, values in sorted(results[(objective, method)].items()):
                for step, value in enumerate(values, start=1):
                    rows.append(f"{method},{objective},{seed},{step},{value!r}")
    csv_text = "\n".join(rows) + "\n"
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(csv_text)

    summary = ["method,objective,steps,seeds,mean,halfwidth"]
    for objective in objectives:
        for method in methods:
            finals = np.array([v[-1] for v in results[(objective, method)].values()])
            mean = float(finals.mean())
            halfwidth = 1.96 * float(finals.std())
            summary.append(
                f"{method},{objective},{args.steps},{len(finals)},{mean!r},{halfwidth!r}"
            )
    summary_text = "\n".join(summary) + "\n"
    summary_path = args.summary or str(Path(args.out).with_suffix(".summary.csv"))
    Path(summary_path).write_text(summary_text)
    print(f"wrote {args.out} and {summary_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# dataset
# ---------------------------------------------------------------------------

def _dataset_generate(args: argparse.Namespace) -> int:
    if args.group == "a":
        instances = ds.generate_group_a()
    elif args.group == "b":
        params = json.loads(args.params) if args.params else {}
        if args.cls is None:
            raise CliError("--class is required for group b")
        try:
            instances = [ds.generate_group_b(args.cls, **params)]
        except (TypeError, ValueError) as exc:
            raise CliError(str(exc))
    elif args.group == "c":
        instances = ds.generate_group_c()
    else:
        raise CliError(f"unknown group {args.group!r}")
    text = ds.write_jsonl(instances)
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {len(instances)} instances to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _read_instances(path: str) -> list[ds.ShapeInstance]:
    try:
        return ds.read_jsonl(Path(path).read_text())
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read dataset file: {exc}")


def _validate_one(sequence: tuple) -> "ds.Violation | None":
    return ds.validate_sequence(sequence)


def _dataset_validate(args: argparse.Namespace) -> int:
    instances = _read_instances(args.infile)
    sequences = [inst.sequence for inst in instances]
    if args.jobs > 1 and len(sequences) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            verdicts = list(pool.map(_validate_one, sequences))
    else:
        verdicts = [ds.validate_sequence(s) for s in sequences]
    bad = [(i, v) for i, v in enumerate(verdicts) if v is not None]
    for i, violation in bad:
        print(f"line {i}: brick {violation.index}: {violation.reason}")
    print(f"{len(instances) - len(bad)}/{len(instances)} instances valid")
    return EXIT_INVALID if bad else EXIT_OK


def _dataset_augment(args: argparse.Namespace) -> int:
    instances = _read_instances(args.infile)
    out_lines = []
    for inst in instances:
        for order in ds.augment(inst, args.seed, args.count):
            out_lines.append(ds.ShapeInstance(inst.class_label, order).to_jsonl())
    text = "\n".join(out_lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {len(out_lines)} sequences to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _dataset_stats(args: argparse.Namespace) -> int:
    instances = _read_instances(args.infile)
    text = ds.stats_csv(instances)
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _dataset_voxelize(args: argparse.Namespace) -> int:
    instances = _read_instances(args.infile)
    if not (0 <= args.index < len(instances)):
        raise CliError(f"--index {args.index} out of range for {len(instances)} instances")
    from .lattice import Combination

    combo = Combination.from_bricks(instances[args.index].sequence)
    target = TargetShape.from_combination(combo, padding=args.padding)
    Path(args.out).write_text(target.to_json())
    print(f"wrote {args.out} ({len(target.cells)} cells, extents {tuple(target.extents)})")
    return EXIT_OK


def cmd_dataset(args: argparse.Namespace) -> int:
    actions = {
        "generate": _dataset_generate,
        "validate": _dataset_validate,
        "augment": _dataset_augment,
        "stats": _dataset_stats,
        "voxelize": _dataset_voxelize,
    }
    return actions[args.action](args)


# ---------------------------------------------------------------------------
# count
# ---------------------------------------------------------------------------

def cmd_count(args: argparse.Namespace) -> int:
    result = count_combinations(args.n, convention=args.convention)
    if args.n == 2 and args.split:
        print(f"total: {result['total']}")
        print(f"parallel: {result['parallel']}")
        print(f"perpendicular: {result['perpendicular']}")
    else:
        print(f"total: {result['total']}")
    if args.n == 3:
        print(f"convention: {result['convention']} (first brick pinned at origin; "
              "published three-brick figures use an unstated dedup convention)")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="brickassembly",
        description="Assemble 2x4 brick structures with Bayesian optimization.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_asm = sub.add_parser("assemble", help="grow a combination toward a target shape")
    p_asm.add_argument("--target", required=True, help="target shape JSON file")
    p_asm.add_argument("--steps", type=int, default=10, metavar="T")
    p_asm.add_argument("--seed", type=int, default=0)
    p_asm.add_argument("--out", default="out", help="output directory")
    p_asm.add_argument("--rollback-window", type=int, default=2, metavar="W")
    p_asm.add_argument("--rollback-threshold", type=float, default=12.0, metavar="A")
    p_asm.add_argument("--rollback-mode", choices=["shortfall", "literal"], default="shortfall")
    p_asm.add_argument("--perturbation", type=float, default=0.5)
    p_asm.add_argument("--config", help="JSON file of flag defaults (same keys as flags)")
    _add_bo_flags(p_asm)
    p_asm.set_defaults(func=cmd_assemble)

    p_bench = sub.add_parser("benchmark", help="explicit-function method comparison")
    p_bench.add_argument("--objective", choices=list(OBJECTIVES) + ["all"], default="all")
    p_bench.add_argument("--methods", default=",".join(METHODS))
    p_bench.add_argument("--steps", type=int, default=20, metavar="T")
    p_bench.add_argument("--seeds", type=int, default=10, help="number of seeds")
    p_bench.add_argument("--seed", type=int, default=0, help="first seed")
    p_bench.add_argument("--out", default="benchmark.csv")
    p_bench.add_argument("--summary", default=None)
    p_bench.add_argument("--jobs", type=int, default=1)
    p_bench.add_argument("--config", help="JSON file of flag defaults")
    p_bench.set_defaults(func=cmd_benchmark)

    p_data = sub.add_parser("dataset", help="dataset operations over JSONL files")
    p_data.add_argument("action", choices=["generate", "validate", "augment", "stats", "voxelize"])
    p_data.add_argument("--group", choices=["a", "b", "c"], default="a")
    p_data.add_argument("--class", dest="cls", default=None, help="group b class name")
    p_data.add_argument("--params", default=None, help="JSON object of generator params")
    p_data.add_argument("--in", dest="infile", default=None, help="input JSONL file")
    p_data.add_argument("--out", default=None)
    p_data.add_argument("--count", type=int, default=1, help="augment: orders per instance")
    p_data.add_argument("--seed", type=int, default=0)
    p_data.add_argument("--index", type=int, default=0, help="voxelize: instance index")
    p_data.add_argument("--padding", type=int, default=0, help="voxelize: extra extent cells")
    p_data.add_argument("--jobs", type=int, default=1, help="validate: parallel workers")
    p_data.set_defaults(func=cmd_dataset)

    p_count = sub.add_parser("count", help="exhaustive combination counts")
    p_count.add_argument("--n", type=int, choices=[2, 3], required=True)
    p_count.add_argument("--split", action="store_true", help="split by direction")
    p_count.add_argument("--convention", choices=["seed-fixed", "translation"],
                         default="seed-fixed")
    p_count.set_defaults(func=cmd_count)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if hasattr(args, "config"):
            _apply_config_file(args, parser, argv)
        if args.command == "dataset" and args.action != "generate" and not args.infile:
            raise CliError(f"dataset {args.action} requires --in")
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
