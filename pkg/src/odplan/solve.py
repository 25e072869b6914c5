"""Dispatch to the three planners with a single seed."""

from __future__ import annotations

from dataclasses import replace

from .coverage import CoverageModel, InfeasibleError, Solution
from .ga import GaConfig, evolve, random_individual, stream
from .ghod import ghod_plan

ALGORITHMS = ("ghod", "gaod", "random")


def random_plan(model: CoverageModel, seed: int, retries: int = 20) -> Solution:
    """Random feasible placement; redraws when construction dead-ends."""
    last = None
    for attempt in range(retries):
        try:
            return random_individual(model, stream(seed, attempt))
        except InfeasibleError as e:
            last = e
    raise InfeasibleError(f"random placement failed {retries} times: {last}", last.gp)


def solve(model: CoverageModel, algorithm: str, seed: int = 0, cfg: GaConfig | None = None,
          trace=None, candidate_stride: int = 1) -> Solution:
    if algorithm == "ghod":
        return ghod_plan(model, candidate_stride)
    if algorithm == "random":
        return random_plan(model, seed)
    if algorithm == "gaod":
        cfg = cfg or GaConfig()
        if cfg.seed != seed:
            cfg = replace(cfg, seed=seed)
        return evolve(model, cfg, trace=trace).solution
    raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
