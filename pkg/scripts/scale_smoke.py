"""Large-warehouse run (415 x 200 m, gs = 1 m, about 83k grid points).

With the default radio one AP reaches about 161 m, so a handful of APs
suffices. ``--threshold -53.6`` shrinks the range to about 25 m, which
needs well over a hundred APs and exercises the windowed coverage code.

    python scripts/scale_smoke.py --threshold -53.6 --racks 10
"""

import argparse
import time

from odplan.coverage import CoverageModel, build_coverage
from odplan.ga import GaConfig, evolve
from odplan.geometry import build_grid, place_random_obstacles
from odplan.propagation import RadioParams
from odplan.reporting import report
from odplan.solve import solve


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--threshold", type=float, default=-68.0)
    ap.add_argument("--racks", type=int, default=0)
    ap.add_argument("--pop", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--algorithms", default="random,ghod,gaod")
    args = ap.parse_args()

    env = build_grid(0, 0, 415, 200, 1)
    racks = place_random_obstacles(env, args.racks, 20, 3, 9, 7.37, args.seed)
    params = RadioParams(threshold=args.threshold)
    model = CoverageModel(env, racks, params)
    print(f"{env.size} grid points, {len(racks)} racks, d_max = {params.max_range:.2f} m")
    cfg = GaConfig(pop_size=args.pop, elitism_rate=0.08, crossover_rate=0.95,
                   mutation_rate=0.05, seed=args.seed, workers=args.workers)

    for alg in args.algorithms.split(","):
        t0 = time.perf_counter()
        if alg == "gaod":
            sol = evolve(model, cfg, trace=lambda s: print("  ", s.as_dict(), flush=True)).solution
        else:
            sol = solve(model, alg, args.seed, cfg)
        dt = time.perf_counter() - t0
        rep = report(sol, build_coverage(sol, model), model, dt)
        print(f"{alg:>7}: {rep.ap_count} APs, {dt:.1f} s, feasible={rep.feasible}, "
              f">2 covered {rep.pct_covered_more_than_twice:.1f}%, "
              f"min power {rep.min_received_power:.2f} dBm, "
              f"min separation {rep.min_inter_ap_separation:.2f} m", flush=True)


if __name__ == "__main__":
    main()
