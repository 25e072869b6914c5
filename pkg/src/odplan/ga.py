"""Genetic over-dimensioning (GAOD) and the random feasible baseline.

Every operator returns a feasible solution: random construction places APs
until two coverage layers exist, crossover repairs its children with the same
two construction passes, and mutation only drops an original AP when the
remaining APs still cover every grid point twice.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .coverage import SEP_EPS, CoverageModel, InfeasibleError, Solution, is_feasible

log = logging.getLogger(__name__)


class EvolutionError(RuntimeError):
    pass


@dataclass(frozen=True)
class GaConfig:
    pop_size: int = 30
    elitism_rate: float = 0.08
    crossover_rate: float = 0.95
    mutation_rate: float = 0.05
    stall_generations: int = 10
    max_generations: int = 500
    seed: int = 0
    workers: int = 1
    retry_budget: int = 20

    def __post_init__(self):
        if self.pop_size < 2:
            raise ValueError("pop_size must be >= 2")
        for name in ("elitism_rate", "crossover_rate", "mutation_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.elitism_rate * self.pop_size < 1:
            raise ValueError("elitism_rate * pop_size must keep at least one elite")
        if self.stall_generations < 1 or self.max_generations < 1:
            raise ValueError("stall_generations and max_generations must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    @property
    def n_elite(self) -> int:
        return min(self.pop_size, math.ceil(self.elitism_rate * self.pop_size - 1e-9))


@dataclass
class Individual:
    solution: Solution
    fitness: float = 1.0

    def __len__(self):
        return len(self.solution)


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for one (generation, slot, attempt) task."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def _pick(rng: np.random.Generator, mask: np.ndarray, offset=None, ny=None) -> int:
    if offset is None:
        flat = np.flatnonzero(mask)
        return int(flat[rng.integers(flat.size)])
    ci, ri = np.nonzero(mask)
    k = rng.integers(ci.size)
    return int((ci[k] + offset[0]) * ny + ri[k] + offset[1])


def _place(model, count, valid, placed, g):
    placed.append(g)
    model.exclude(valid, g)
    model.add(count, g)


def place_until_valid_covered(model: CoverageModel, count, valid, placed, rng) -> None:
    """Random APs on valid, not-yet-twice-covered points until none are left."""
    while True:
        cand = valid & (count < 2)
        if not cand.any():
            return
        _place(model, count, valid, placed, _pick(rng, cand))


def close_coverage_gaps(model: CoverageModel, count, valid, placed, rng) -> None:
    """Cover the remaining points twice, starting from the first in grid order.

    Each new AP is drawn near the first under-covered point: inside the
    d_AP_min square around it if possible, else inside the d_max square, else
    anywhere it still reaches that point.
    """
    ny = model.env.ny
    halves = (model.d_ap_min / 2, model.d_max / 2)
    while True:
        need = model.needing(count).ravel()
        g = int(need.argmax())
        if not need[g]:
            return
        grid, reach, _ = model.window(g)
        base = valid[grid] & reach
        cand = None
        for half in halves:
            _, square = model.square_window(g, half)
            m = base & square
            if m.any():
                cand = m
                break
        if cand is None:
            if not base.any():
                raise InfeasibleError(
                    f"no valid AP location can cover grid point {g} {model.env.point(g)} "
                    "a second time", g)
            cand = base
        _place(model, count, valid, placed,
               _pick(rng, cand, (grid[0].start, grid[1].start), ny))


def random_individual(model: CoverageModel, rng: np.random.Generator) -> Solution:
    """Random feasible two-layer placement (also the random baseline)."""
    count = model.zeros()
    valid = model.candidates.copy()
    placed: list[int] = []
    place_until_valid_covered(model, count, valid, placed, rng)
    close_coverage_gaps(model, count, valid, placed, rng)
    return Solution(placed)


def fitness(n_aps: int, worst: int) -> float:
    """Positive, larger-is-better score: worst - n_aps + 1 within a generation."""
    return float(worst - n_aps + 1)


def roulette_select(population: Sequence[Individual], rng: np.random.Generator) -> Individual:
    weights = np.array([ind.fitness for ind in population], dtype=float)
    cum = np.cumsum(weights)
    i = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    return population[min(i, len(population) - 1)]


def _separate_band(model: CoverageModel, aps: list[int], x_cut: float) -> list[int]:
    d = model.d_ap_min
    xs, ys = model.env.coords(aps)
    kept, band = [], []
    for g, x, y in zip(aps, xs.tolist(), ys.tolist()):
        if abs(x - x_cut) <= d:
            if any(math.hypot(x - bx, y - by) < d - SEP_EPS for bx, by in band):
                continue
            band.append((x, y))
        kept.append(g)
    return kept


def repair(model: CoverageModel, aps: list[int], rng: np.random.Generator) -> Solution:
    """Re-establish double coverage around a separation-feasible AP set."""
    count = model.counts(aps)
    placed = list(aps)
    if model.needing(count).any():
        valid = model.valid_mask(aps)
        place_until_valid_covered(model, count, valid, placed, rng)
        close_coverage_gaps(model, count, valid, placed, rng)
    return Solution(placed)


def crossover(a: Solution, b: Solution, model: CoverageModel,
              rng: np.random.Generator) -> tuple[Solution, Solution]:
    """Swap the parts of two parents on either side of a random vertical line."""
    if not len(a) or not len(b):
        return a, b
    xa, _ = model.env.coords(a.indices)
    xb, _ = model.env.coords(b.indices)
    lo = max(xa.min(), xb.min())
    hi = min(xa.max(), xb.max())
    if not lo < hi:
        return a, b
    x_cut = float(rng.uniform(lo, hi))
    left_a = [g for g, x in zip(a, xa) if x < x_cut]
    right_a = [g for g, x in zip(a, xa) if x >= x_cut]
    left_b = [g for g, x in zip(b, xb) if x < x_cut]
    right_b = [g for g, x in zip(b, xb) if x >= x_cut]
    children = []
    for aps in (left_a + right_b, left_b + right_a):
        children.append(repair(model, _separate_band(model, aps, x_cut), rng))
    return children[0], children[1]


def mutation_size(rate: float, n_aps: int) -> int:
    return math.ceil(rate * n_aps * 0.5 - 1e-12)


def mutate(sol: Solution, model: CoverageModel, rate: float,
           rng: np.random.Generator) -> Solution:
    """Add a few random APs, then drop originals the additions make redundant.

    An original AP is dropped when every point it covers is also covered by
    the additions and, in grid order, dropping it keeps every point covered
    at least twice.
    """
    orig = list(sol)
    valid = model.valid_mask(orig)
    want = mutation_size(rate, len(orig))
    added: list[int] = []
    for _ in range(want):
        if not valid.any():
            log.debug("mutation placed %d of %d APs: no valid grid point left", len(added), want)
            break
        g = _pick(rng, valid)
        added.append(g)
        model.exclude(valid, g)
    if not added:
        return sol
    new_cov = np.zeros(model.shape, dtype=bool)
    for g in added:
        grid, mask, _ = model.window(g)
        new_cov[grid] |= mask
    count = model.counts(orig + added)
    keep = []
    for g in orig:
        grid, mask, _ = model.window(g)
        if not (mask & ~new_cov[grid]).any() and (count[grid][mask] > 2).all():
            count[grid] -= mask
            continue
        keep.append(g)
    return Solution(keep + added)


def _breed(model, cfg: GaConfig, a: Solution, b: Solution, rng) -> list[Solution]:
    if rng.random() < cfg.crossover_rate:
        a, b = crossover(a, b, model, rng)
    out = []
    for child in (a, b):
        if rng.random() < cfg.mutation_rate:
            child = mutate(child, model, cfg.mutation_rate, rng)
        out.append(child)
    return out


def _with_retries(fn, cfg: GaConfig, gen: int, slot: int):
    last = None
    for attempt in range(cfg.retry_budget):
        try:
            return fn(stream(cfg.seed, gen, slot, attempt))
        except InfeasibleError as e:
            last = e
    raise EvolutionError(
        f"generation {gen}, slot {slot}: no feasible individual after "
        f"{cfg.retry_budget} attempts ({last})")


def _rank_key(sol: Solution):
    return (len(sol), sol.indices)


def _assign_fitness(pop: list[Individual]) -> None:
    worst = max(len(ind) for ind in pop)
    for ind in pop:
        ind.fitness = fitness(len(ind), worst)


@dataclass
class GenerationStats:
    generation: int
    best: int
    mean: float

    def as_dict(self):
        return {"generation": self.generation, "best": self.best, "mean": self.mean}


def evolve(model: CoverageModel, cfg: GaConfig,
           trace: Callable[[GenerationStats], None] | None = None,
           check: bool = False) -> Individual:
    """Run GAOD and return the best individual seen.

    Offspring of one generation are bred independently (one random stream per
    slot), optionally on ``cfg.workers`` threads; selection and replacement
    happen between generations.
    """
    pool = ThreadPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    run = pool.map if pool else map
    try:
        sols = list(run(
            lambda slot: _with_retries(lambda rng: random_individual(model, rng), cfg, 0, slot),
            range(cfg.pop_size)))
        pop = [Individual(s) for s in sols]
        best = min(sols, key=_rank_key)
        stall = 0
        gen = 0
        _report(model, pop, gen, trace, check)
        n_elite = cfg.n_elite
        n_children = cfg.pop_size - n_elite
        while stall < cfg.stall_generations and gen < cfg.max_generations:
            gen += 1
            _assign_fitness(pop)
            ranked = sorted(pop, key=lambda ind: _rank_key(ind.solution))
            elites = [Individual(ind.solution) for ind in ranked[:n_elite]]
            sel = stream(cfg.seed, gen, 0, 0)
            pairs = [(roulette_select(pop, sel).solution, roulette_select(pop, sel).solution)
                     for _ in range((n_children + 1) // 2)]

            def breed(k, pairs=pairs, gen=gen):
                a, b = pairs[k]
                return _with_retries(lambda rng: _breed(model, cfg, a, b, rng), cfg, gen, k + 1)

            children = [c for kids in run(breed, range(len(pairs))) for c in kids]
            pop = elites + [Individual(c) for c in children[:n_children]]
            _report(model, pop, gen, trace, check)
            gen_best = min((ind.solution for ind in pop), key=_rank_key)
            if len(gen_best) < len(best):
                best, stall = gen_best, 0
            else:
                stall += 1
        _assign_fitness(pop)
        worst = max(len(ind) for ind in pop)
        return Individual(best, fitness(len(best), worst))
    finally:
        if pool:
            pool.shutdown()


def _report(model, pop, gen, trace, check):
    if check:
        for ind in pop:
            rep = is_feasible(ind.solution, model)
            if not rep.ok:
                raise EvolutionError(f"generation {gen}: infeasible individual {rep}")
    if trace is not None:
        sizes = [len(ind) for ind in pop]
        trace(GenerationStats(gen, min(sizes), float(np.mean(sizes))))
