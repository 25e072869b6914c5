"""Trend-level comparison of GHOD, GAOD and random placement.

Runs the three planners on the 30 x 12 m desk hall, empty and with racks,
and prints the same columns as the empty/obstructed comparison tables:
AP count, runtime and the share of points covered at least / more than twice.

    python scripts/reproduce_trends.py --seeds 20 --out results/trends
"""

import argparse
from pathlib import Path

from odplan.coverage import CoverageModel
from odplan.ga import GaConfig
from odplan.geometry import build_grid, place_random_obstacles
from odplan.propagation import RadioParams
from odplan.reporting import BenchmarkTable, benchmark


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--racks", type=int, default=2)
    ap.add_argument("--threshold", type=float, default=-50.0)
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    params = RadioParams(threshold=args.threshold)
    cfg = GaConfig(pop_size=30, elitism_rate=0.08, crossover_rate=0.95, mutation_rate=0.05)
    env = build_grid(0, 0, 30, 12, 1)
    seeds = list(range(args.seeds))
    print(f"d_max = {params.max_range:.2f} m, d_AP_min = {params.d_ap_min} m\n")

    empty = benchmark(CoverageModel(env, (), params), ["ghod", "gaod", "random"], seeds, cfg,
                      workers=args.workers)
    print("empty hall")
    print(empty.to_text())

    # one rack layout per seed, same seed drives the planner
    runs = []
    for s in seeds:
        racks = place_random_obstacles(env, args.racks, 20, 3, 9, 7.37, s)
        t = benchmark(CoverageModel(env, racks, params), ["ghod", "gaod", "random"], [s], cfg)
        runs += t.runs
    obstructed = BenchmarkTable(runs)
    print(f"hall with {args.racks} racks (layout seed = run seed)")
    print(obstructed.to_text())

    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, table in (("empty", empty), ("racks", obstructed)):
            (out / f"{name}_runs.csv").write_text(table.runs_csv())
            (out / f"{name}_summary.csv").write_text(table.summary_csv())


if __name__ == "__main__":
    main()
