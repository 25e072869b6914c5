"""GAOD and GHOD against the exact optimum on tiny rooms.

Ten rooms of at most 6 x 6 grid points with short radio range; the optimum
comes from an exhaustive branch-and-bound search over AP subsets.

    python scripts/toy_optimality.py --seeds 20
"""

import argparse
import sys
import time
from collections import Counter
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from odplan.coverage import CoverageModel  # noqa: E402
from odplan.ga import GaConfig, evolve  # noqa: E402
from odplan.ghod import ghod_plan  # noqa: E402
from oracles import min_double_cover  # noqa: E402
from test_acceptance import TOY_GA, toy_instance  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--pop", type=int, default=TOY_GA["pop_size"])
    ap.add_argument("--generations", type=int, default=TOY_GA["max_generations"])
    args = ap.parse_args()
    ga = dict(TOY_GA, pop_size=args.pop, max_generations=args.generations)
    for i in range(10):
        env, obstacles, params = toy_instance(i)
        m = CoverageModel(env, obstacles, params)
        t0 = time.perf_counter()
        opt = min_double_cover(env, obstacles, params)
        sizes = Counter(len(evolve(m, GaConfig(seed=s, **ga))) for s in range(args.seeds))
        print(f"room {i}: {env.nx}x{env.ny}, d_max {params.max_range:.2f} m, "
              f"optimum {opt}, ghod {len(ghod_plan(m))}, gaod sizes {dict(sorted(sizes.items()))}, "
              f"{time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
