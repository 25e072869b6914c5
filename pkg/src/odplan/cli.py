"""Command-line entry point: ``odplan plan | validate | bench``.

Exit codes: 0 feasible, 2 infeasible (no plan found, or the plan fails the
feasibility check), 1 bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, read_config
from .coverage import CoverageModel, InfeasibleError, Solution, build_coverage, is_feasible
from .ga import EvolutionError
from .geometry import obstacles_to_csv
from .reporting import benchmark, heatmap, report
from .solve import ALGORITHMS, solve

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE = 0, 1, 2

log = logging.getLogger("odplan")


class InputError(Exception):
    pass


def _model(args):
    cfg = read_config(args.config)
    env, obstacles, params, ga = cfg.build()
    if getattr(args, "workers", None):
        ga = replace(ga, workers=args.workers)
    return CoverageModel(env, obstacles, params), ga


def solution_csv(sol: Solution, model: CoverageModel) -> str:
    xs, ys = model.env.coords(sol.indices)
    lines = ["index,x,y"]
    for j, (x, y) in enumerate(zip(xs.tolist(), ys.tolist()), 1):
        lines.append(f"{j},{x:.6f},{y:.6f}")
    return "\n".join(lines) + "\n"


def read_solution_csv(path, model: CoverageModel) -> tuple[Solution, list[tuple[float, float]]]:
    """Parse an (index, x, y) CSV.

    Returns the on-grid solution plus any points that lie outside the
    environment; an in-bounds point that is not a grid point is an input error.
    """
    env = model.env
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from e
    rows = [r for r in rows if any(c.strip() for c in r)]
    if rows and rows[0] and rows[0][0].strip().lower() == "index":
        rows = rows[1:]
    indices, outside = [], []
    for no, row in enumerate(rows, 2):
        try:
            x, y = float(row[-2]), float(row[-1])
        except (ValueError, IndexError) as e:
            raise InputError(f"{path}: row {no}: expected index,x,y, got {row}") from e
        if not env.contains(x, y):
            outside.append((x, y))
            continue
        g = env.locate(x, y)
        if g is None:
            raise InputError(f"{path}: row {no}: ({x}, {y}) is not a grid point")
        indices.append(g)
    try:
        sol = Solution(indices)
    except ValueError as e:
        raise InputError(f"{path}: {e}") from e
    return sol, outside


def _write_plan(out: Path, sol, model, runtime, trace_lines):
    out.mkdir(parents=True, exist_ok=True)
    cmap = build_coverage(sol, model)
    rep = report(sol, cmap, model, runtime)
    (out / "solution.csv").write_text(solution_csv(sol, model))
    (out / "report.json").write_text(json.dumps(rep.to_json_dict(), indent=2) + "\n")
    ppm, cov = heatmap(cmap, model)
    (out / "heatmap.ppm").write_bytes(ppm)
    (out / "coverage.csv").write_text(cov)
    (out / "obstacles.csv").write_text(obstacles_to_csv(model.obstacles))
    if trace_lines is not None:
        (out / "trace.jsonl").write_text("".join(trace_lines))
    return rep


def cmd_plan(args) -> int:
    model, ga = _model(args)
    trace_lines = [] if args.trace else None

    def trace(stats):
        line = json.dumps(stats.as_dict()) + "\n"
        trace_lines.append(line)
        log.info(line.rstrip())

    t0 = time.perf_counter()
    try:
        sol = solve(model, args.algorithm, args.seed, ga,
                    trace=trace if args.trace else None,
                    candidate_stride=args.candidate_stride)
    except (InfeasibleError, EvolutionError) as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    rep = _write_plan(Path(args.out), sol, model, time.perf_counter() - t0, trace_lines)
    print(json.dumps(rep.to_json_dict()))
    return EXIT_OK if rep.feasible else EXIT_INFEASIBLE


def cmd_validate(args) -> int:
    model, _ = _model(args)
    sol, outside = read_solution_csv(args.solution, model)
    cmap = build_coverage(sol, model)
    feas = is_feasible(sol, model, cmap)
    out = report(sol, cmap, model).to_json_dict()
    out["feasible"] = feas.ok and not outside
    out["checks"] = {"double_coverage": feas.double_coverage, "separation": feas.separation,
                     "bounds": feas.bounds and not outside}
    if feas.uncovered_gp is not None:
        out["uncovered_point"] = list(model.env.point(feas.uncovered_gp))
    if feas.violating_pair is not None:
        out["violating_pair"] = [list(model.env.point(g)) for g in feas.violating_pair]
    if outside:
        out["outside_points"] = [list(p) for p in outside]
    print(json.dumps(out, indent=2))
    return EXIT_OK if out["feasible"] else EXIT_INFEASIBLE


def cmd_bench(args) -> int:
    model, ga = _model(args)
    algorithms = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    bad = [a for a in algorithms if a not in ALGORITHMS]
    if bad:
        raise InputError(f"unknown algorithm(s) {bad}; choose from {ALGORITHMS}")
    if args.seeds < 1:
        raise InputError("--seeds must be >= 1")
    seeds = list(range(args.first_seed, args.first_seed + args.seeds))
    table = benchmark(model, algorithms, seeds, ga, workers=args.bench_workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "runs.csv").write_text(table.runs_csv())
    (out / "summary.csv").write_text(table.summary_csv())
    text = table.to_text()
    (out / "summary.txt").write_text(text)
    print(text, end="")
    return EXIT_OK if all(r.feasible for r in table.runs) else EXIT_INFEASIBLE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="odplan",
                                description="Two-layer access-point placement planner.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    plan = sub.add_parser("plan", help="solve one instance")
    plan.add_argument("--config", required=True)
    plan.add_argument("--algorithm", choices=ALGORITHMS, default="ghod")
    plan.add_argument("--seed", type=int, default=0)
    plan.add_argument("--out", required=True)
    plan.add_argument("--trace", action="store_true",
                      help="write per-generation progress to trace.jsonl")
    plan.add_argument("--workers", type=int, default=None,
                      help="threads for offspring breeding (overrides [ga] workers)")
    plan.add_argument("--candidate-stride", type=int, default=1,
                      help="first-layer candidate subsampling for ghod")
    plan.set_defaults(func=cmd_plan)

    val = sub.add_parser("validate", help="check an existing layout")
    val.add_argument("--config", required=True)
    val.add_argument("--solution", required=True)
    val.set_defaults(func=cmd_validate)

    bench = sub.add_parser("bench", help="multi-seed comparison")
    bench.add_argument("--config", required=True)
    bench.add_argument("--seeds", type=int, required=True)
    bench.add_argument("--first-seed", type=int, default=0)
    bench.add_argument("--out", required=True)
    bench.add_argument("--algorithms", default=",".join(ALGORITHMS))
    bench.add_argument("--bench-workers", type=int, default=1,
                       help="seeds run concurrently")
    bench.add_argument("--workers", type=int, default=None)
    bench.set_defaults(func=cmd_bench)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    if getattr(args, "seed", 0) < 0:
        print("error: --seed must be non-negative", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
    except (InputError, ValueError) as e:
        print(f"input error: {e}", file=sys.stderr)
    return EXIT_INPUT


def main() -> None:
    sys.exit(run())
