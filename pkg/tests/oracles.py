"""Brute-force reference implementations used only by the tests.

These deliberately avoid the windowed machinery in ``odplan.coverage``: every
answer is recomputed from the scalar link-budget functions over the full grid.
"""

from __future__ import annotations

import math

import numpy as np

from odplan.geometry import GridEnvironment, footprint_mask
from odplan.propagation import covers


def usable_indices(env: GridEnvironment, obstacles) -> list[int]:
    mask = env.obstacle_mask | footprint_mask(env, obstacles)
    return [g for g in range(env.size) if not mask.flat[g]]


def full_scan_counts(env, obstacles, params, aps) -> np.ndarray:
    usable = set(usable_indices(env, obstacles))
    count = np.zeros(env.size, dtype=int)
    for a in aps:
        p = env.point(a)
        for g in usable:
            if covers(g, p, env, obstacles, params):
                count[g] += 1
    return count


def coverage_sets(env, obstacles, params, candidates) -> dict[int, frozenset]:
    usable = usable_indices(env, obstacles)
    return {a: frozenset(g for g in usable if covers(g, env.point(a), env, obstacles, params))
            for a in candidates}


def min_double_cover(env, obstacles, params, candidates=None, max_k: int = 16) -> int:
    """Exact minimum number of APs giving double coverage under separation.

    Iterative deepening over "which AP covers the first deficient point",
    pruned by a counting bound. Returns -1 when no solution up to ``max_k``.
    """
    usable = usable_indices(env, obstacles)
    if candidates is None:
        candidates = usable
    sets = coverage_sets(env, obstacles, params, candidates)
    bit = {g: 1 << i for i, g in enumerate(usable)}
    masks = {a: sum(bit[g] for g in s) for a, s in sets.items()}
    full = (1 << len(usable)) - 1
    widest = max(m.bit_count() for m in masks.values())
    pts = {a: env.point(a) for a in candidates}
    by_point = {i: [a for a in candidates if masks[a] >> i & 1] for i in range(len(usable))}
    d_min = params.d_ap_min

    def search(chosen, ones, twos, budget):
        deficit = (full & ~ones).bit_count() * 2 + (ones & ~twos).bit_count()
        if deficit == 0:
            return True
        if budget * widest < deficit:
            return False
        lacking = full & ~twos
        i = (lacking & -lacking).bit_length() - 1
        for a in by_point[i]:
            if a in chosen:
                continue
            if any(math.dist(pts[a], pts[b]) < d_min - 1e-9 for b in chosen):
                continue
            m = masks[a]
            chosen.append(a)
            if search(chosen, ones | m, twos | (ones & m), budget - 1):
                return True
            chosen.pop()
        return False

    for k in range(1, max_k + 1):
        if search([], 0, 0, k):
            return k
    return -1
