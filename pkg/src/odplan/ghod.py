"""Greedy over-dimensioning: build the first and then the second coverage
layer, each time placing the AP that newly covers the most grid points."""

from __future__ import annotations

import heapq
from typing import Iterable

import numpy as np
from scipy.signal import fftconvolve

from .coverage import CoverageModel, InfeasibleError, Solution


def _gain(model: CoverageModel, target: np.ndarray, g: int) -> int:
    grid, mask, _ = model.window(g)
    return int(np.count_nonzero(mask & target[grid]))


def layer_target(model: CoverageModel, count: np.ndarray, layer: int) -> np.ndarray:
    """Points an AP would newly cover for ``layer``: count == layer - 1."""
    return model.usable & (count == layer - 1)


def best_candidate(candidates: Iterable[int], model: CoverageModel, count: np.ndarray,
                   layer: int) -> int:
    """Candidate with the largest gain for ``layer``; ties go to the lowest index."""
    target = layer_target(model, count, layer)
    best_g, best = None, -1
    for g in sorted(int(c) for c in candidates):
        gain = _gain(model, target, g)
        if gain > best:
            best_g, best = g, gain
    if best_g is None:
        raise ValueError("no candidates")
    return best_g


def _initial_gains(model: CoverageModel, target: np.ndarray, cand: np.ndarray):
    idx = np.flatnonzero(cand)
    if model.clean:
        R = model.reach
        stencil = model._cover.astype(float)
        conv = fftconvolve(target.astype(float), stencil, mode="full")
        conv = conv[R:R + model.shape[0], R:R + model.shape[1]]
        gains = np.rint(conv).astype(np.int64).ravel()[idx]
    else:
        gains = np.array([_gain(model, target, g) for g in idx], dtype=np.int64)
    return idx, gains


def _fill_layer(model: CoverageModel, count: np.ndarray, cand: np.ndarray,
                placed: list[int], layer: int) -> None:
    target = layer_target(model, count, layer)
    remaining = int(target.sum())
    if not remaining:
        return
    idx, gains = _initial_gains(model, target, cand)
    # gains only shrink as the layer fills, so stale heap keys are upper bounds
    heap = [(-int(v), int(g)) for g, v in zip(idx, gains) if v > 0]
    heapq.heapify(heap)
    while remaining:
        chosen = None
        while heap:
            neg, g = heapq.heappop(heap)
            if not cand.flat[g]:
                continue
            gain = _gain(model, target, g)
            if gain == -neg:
                chosen = g
                break
            if gain > 0:
                heapq.heappush(heap, (-gain, g))
        if chosen is None:
            stuck = int(np.flatnonzero(target)[0])
            raise InfeasibleError(
                f"layer {layer}: no candidate AP location covers grid point {stuck} "
                f"{model.env.point(stuck)}", stuck)
        grid, mask, _ = model.window(chosen)
        count[grid] += mask
        target[grid] &= ~mask
        remaining -= gain
        placed.append(chosen)
        model.exclude(cand, chosen)


def ghod_plan(model: CoverageModel, candidate_stride: int = 1) -> Solution:
    """Two-layer greedy placement.

    ``candidate_stride`` subsamples the first-layer candidate grid (every
    stride-th column and row); the second layer always considers every valid
    grid point.
    """
    if candidate_stride < 1:
        raise ValueError("candidate_stride must be >= 1")
    count = model.zeros()
    placed: list[int] = []
    cand = model.candidates.copy()
    if candidate_stride > 1:
        sub = np.zeros_like(cand)
        sub[::candidate_stride, ::candidate_stride] = True
        cand &= sub
    _fill_layer(model, count, cand, placed, layer=1)
    _fill_layer(model, count, model.valid_mask(placed), placed, layer=2)
    return Solution(placed)
