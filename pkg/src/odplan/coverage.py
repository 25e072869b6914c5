"""Coverage counting, windowed spatial queries and feasibility checks.

All per-grid-point state lives in dense ``(nx, ny)`` arrays whose C-order
ravel is the lexicographic grid order, so flat index ``g`` and the 2D cell
``divmod(g, ny)`` are interchangeable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .geometry import GridEnvironment, Obstacle, Point2D, segments_blocked
from .propagation import COVER_EPS, RadioParams, path_loss

# Two APs closer than d_AP_min - SEP_EPS violate the separation constraint.
SEP_EPS = 1e-9

_CACHE_BYTES = 256 * 2**20


class InfeasibleError(RuntimeError):
    """No placement can repair the coverage of ``gp`` under the constraints."""

    def __init__(self, message: str, gp: int | None = None):
        super().__init__(message)
        self.gp = gp


@dataclass(frozen=True)
class Solution:
    """AP locations as grid indices, kept sorted (lexicographic order)."""

    indices: tuple[int, ...] = ()

    def __post_init__(self):
        idx = tuple(sorted(int(i) for i in self.indices))
        if any(a == b for a, b in zip(idx, idx[1:])):
            raise ValueError("two APs on the same grid point")
        object.__setattr__(self, "indices", idx)

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def points(self, env: GridEnvironment) -> list[Point2D]:
        return [env.point(g) for g in self.indices]


class CoverageModel:
    """Environment, obstacles and radio parameters with precomputed stencils.

    ``window(g)`` answers "which grid points does an AP on ``g`` cover" as a
    rectangular slice of the grid plus a boolean mask and received powers on
    that slice. Without obstacles every window is a view into one stencil.
    """

    def __init__(self, env: GridEnvironment, obstacles: Sequence[Obstacle] = (),
                 params: RadioParams | None = None):
        self.params = params or RadioParams()
        self.obstacles = tuple(obstacles)
        self.env = env.with_obstacles(self.obstacles)
        self.usable = ~self.env.obstacle_mask
        self.usable.flags.writeable = False
        cand = self.usable.copy()
        if self.env.boundary_only:
            cand &= self.env.perimeter_mask()
        cand.flags.writeable = False
        self.candidates = cand
        self.d_max = self.params.max_range
        self.d_ap_min = self.params.d_ap_min
        # an obstacle attenuates links even if it occupies no grid point
        self.clean = not self.obstacles

        gs = self.env.gs
        self.reach = int(math.floor(self.d_max / gs + 1e-9))
        R = self.reach
        off = np.arange(-R, R + 1)
        DC, DR = np.meshgrid(off, off, indexing="ij")
        dist = gs * np.hypot(DC, DR)
        p = self.params
        power = p.tp_max + p.gain - p.margin - path_loss(dist, 0.0, p)
        self._power = power
        self._cover = power >= p.threshold - COVER_EPS
        self._cheb = gs * np.maximum(np.abs(DC), np.abs(DR))
        for a in (self._power, self._cover, self._cheb):
            a.flags.writeable = False

        S = int(math.ceil(self.d_ap_min / gs))
        soff = np.arange(-S, S + 1)
        SC, SR = np.meshgrid(soff, soff, indexing="ij")
        self.sep_reach = S
        self._sep = gs * np.hypot(SC, SR) < self.d_ap_min - SEP_EPS
        self._sep.flags.writeable = False

        side = 2 * R + 1
        per_window = side * min(side, self.env.ny) * 9
        self._window_cached = lru_cache(maxsize=max(64, _CACHE_BYTES // per_window))(
            self._window_obstructed)

    # -- geometry helpers -------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.env.shape

    @property
    def size(self) -> int:
        return self.env.size

    def _clip(self, g: int, reach: int):
        c, r = divmod(int(g), self.env.ny)
        c0, c1 = max(0, c - reach), min(self.env.nx, c + reach + 1)
        r0, r1 = max(0, r - reach), min(self.env.ny, r + reach + 1)
        grid = (slice(c0, c1), slice(r0, r1))
        sten = (slice(c0 - c + reach, c1 - c + reach), slice(r0 - r + reach, r1 - r + reach))
        return grid, sten

    def window(self, g: int):
        """(grid slices, covered mask, received power) for an AP on ``g``."""
        if self.clean:
            grid, sten = self._clip(g, self.reach)
            return grid, self._cover[sten], self._power[sten]
        return self._window_cached(int(g))

    def _window_obstructed(self, g: int):
        grid, sten = self._clip(g, self.reach)
        power = self._power[sten].copy()
        env = self.env
        xa, ya = env.point(g)
        X = env.xs[grid[0]][:, None]
        Y = env.ys[grid[1]][None, :]
        bx0, bx1 = X[0, 0], X[-1, 0]
        by0, by1 = Y[0, 0], Y[0, -1]
        for o in self.obstacles:
            if o.x1 < bx0 or o.x0 > bx1 or o.y1 < by0 or o.y0 > by1:
                continue
            power -= o.loss * segments_blocked(xa, ya, X, Y, o)
        mask = (power >= self.params.threshold - COVER_EPS) & self.usable[grid]
        power[~self.usable[grid]] = -np.inf
        mask.flags.writeable = False
        power.flags.writeable = False
        return grid, mask, power

    def sep_window(self, g: int):
        """(grid slices, mask) of points closer than d_AP_min to ``g``."""
        grid, sten = self._clip(g, self.sep_reach)
        return grid, self._sep[sten]

    def square_window(self, g: int, half: float):
        """(grid slices, mask) of the axis-aligned square of half side ``half``."""
        reach = min(self.reach, int(math.floor(half / self.env.gs + 1e-9)))
        grid, sten = self._clip(g, self.reach)
        return grid, self._cheb[sten] <= reach * self.env.gs + 1e-9

    def covered_by(self, g: int) -> np.ndarray:
        """Flat indices of the grid points an AP on ``g`` covers."""
        (cs, rs), mask, _ = self.window(g)
        ci, ri = np.nonzero(mask)
        return (ci + cs.start) * self.env.ny + (ri + rs.start)

    # -- count-array primitives used by the solvers ------------------------

    def zeros(self, dtype=np.int32) -> np.ndarray:
        return np.zeros(self.shape, dtype=dtype)

    def add(self, count: np.ndarray, g: int, delta: int = 1) -> None:
        grid, mask, _ = self.window(g)
        if delta > 0:
            count[grid] += mask
        else:
            count[grid] -= mask

    def exclude(self, valid: np.ndarray, g: int) -> None:
        """Drop points within d_AP_min of ``g`` from ``valid``."""
        grid, mask = self.sep_window(g)
        valid[grid] &= ~mask

    def counts(self, indices: Iterable[int]) -> np.ndarray:
        count = self.zeros()
        for g in indices:
            self.add(count, g)
        return count

    def valid_mask(self, indices: Iterable[int]) -> np.ndarray:
        valid = self.candidates.copy()
        for g in indices:
            self.exclude(valid, g)
        return valid

    def needing(self, count: np.ndarray, layers: int = 2) -> np.ndarray:
        return self.usable & (count < layers)


@dataclass
class CoverageMap:
    """Per-grid-point coverage count and best received power (dBm)."""

    count: np.ndarray
    best_power: np.ndarray
    usable: np.ndarray = field(repr=False)
    aps: list[int] = field(default_factory=list)


def build_coverage(sol: Solution | Iterable[int], model: CoverageModel) -> CoverageMap:
    count = model.zeros()
    best = np.full(model.shape, -np.inf)
    for g in sol:
        grid, mask, power = model.window(g)
        count[grid] += mask
        np.maximum(best[grid], np.where(mask, power, -np.inf), out=best[grid])
    return CoverageMap(count, best, model.usable, list(sol))


def apply_ap(cmap: CoverageMap, g: int, model: CoverageModel, delta: int = 1) -> CoverageMap:
    """Add (delta=+1) or remove (delta=-1) one AP, updating ``cmap`` in place."""
    g = int(g)
    grid, mask, power = model.window(g)
    if delta > 0:
        cmap.count[grid] += mask
        np.maximum(cmap.best_power[grid], np.where(mask, power, -np.inf),
                   out=cmap.best_power[grid])
        cmap.aps.append(g)
        return cmap
    if g not in cmap.aps:
        raise ValueError(f"AP at grid point {g} is not counted in this map")
    cmap.aps.remove(g)
    cmap.count[grid] -= mask
    cs, rs = grid
    best = np.full(mask.shape, -np.inf)
    for h in cmap.aps:
        (hc, hr), hmask, hpower = model.window(h)
        c0, c1 = max(cs.start, hc.start), min(cs.stop, hc.stop)
        r0, r1 = max(rs.start, hr.start), min(rs.stop, hr.stop)
        if c0 >= c1 or r0 >= r1:
            continue
        src = (slice(c0 - hc.start, c1 - hc.start), slice(r0 - hr.start, r1 - hr.start))
        dst = (slice(c0 - cs.start, c1 - cs.start), slice(r0 - rs.start, r1 - rs.start))
        np.maximum(best[dst], np.where(hmask[src], hpower[src], -np.inf), out=best[dst])
    cmap.best_power[grid] = best
    return cmap


def closest_pair(xs: Sequence[float], ys: Sequence[float]):
    """Minimum pairwise distance of points sorted by x, with the pair.

    Sweeps in x order and stops scanning once the x gap alone exceeds the
    best distance so far. Returns ``(inf, None)`` for fewer than two points.
    """
    best, pair = math.inf, None
    n = len(xs)
    for i in range(n):
        for j in range(i + 1, n):
            dx = xs[j] - xs[i]
            if dx >= best:
                break
            d = math.hypot(dx, ys[j] - ys[i])
            if d < best:
                best, pair = d, (i, j)
    return best, pair


def first_separation_violation(xs, ys, d_min: float):
    """First lexicographic pair (i, j) closer than ``d_min``, else None."""
    n = len(xs)
    for i in range(n):
        for j in range(i + 1, n):
            dx = xs[j] - xs[i]
            if dx >= d_min:
                break
            if math.hypot(dx, ys[j] - ys[i]) < d_min - SEP_EPS:
                return i, j
    return None


@dataclass(frozen=True)
class FeasibilityReport:
    double_coverage: bool
    separation: bool
    bounds: bool
    uncovered_gp: int | None = None
    violating_pair: tuple[int, int] | None = None
    misplaced_ap: int | None = None

    @property
    def ok(self) -> bool:
        return self.double_coverage and self.separation and self.bounds

    def __bool__(self):
        return self.ok


def is_feasible(sol: Solution, model: CoverageModel, cmap: CoverageMap | None = None) -> FeasibilityReport:
    env = model.env
    misplaced = next((g for g in sol if not (0 <= g < env.size)
                      or not model.candidates.flat[g]), None)
    placed = [g for g in sol if 0 <= g < env.size]
    if cmap is None:
        count = model.counts(placed)
    else:
        count = cmap.count
    need = model.needing(count).ravel()
    first = int(need.argmax()) if need.any() else None
    xs, ys = env.coords(placed)
    pair = first_separation_violation(xs.tolist(), ys.tolist(), model.d_ap_min)
    if pair is not None:
        pair = (placed[pair[0]], placed[pair[1]])
    return FeasibilityReport(first is None, pair is None, misplaced is None,
                             first, pair, misplaced)


def neighbors_within(env: GridEnvironment, center: Sequence[float], radius: float) -> list[int]:
    """Usable grid points within ``radius`` of ``center``, in grid order."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    cx, cy = center
    gs = env.gs
    c0 = max(0, math.ceil((cx - radius - env.x_min) / gs - 1e-9))
    c1 = min(env.nx - 1, math.floor((cx + radius - env.x_min) / gs + 1e-9))
    r0 = max(0, math.ceil((cy - radius - env.y_min) / gs - 1e-9))
    r1 = min(env.ny - 1, math.floor((cy + radius - env.y_min) / gs + 1e-9))
    if c0 > c1 or r0 > r1:
        return []
    X = env.xs[c0:c1 + 1][:, None]
    Y = env.ys[r0:r1 + 1][None, :]
    hit = (np.hypot(X - cx, Y - cy) <= radius) & ~env.obstacle_mask[c0:c1 + 1, r0:r1 + 1]
    ci, ri = np.nonzero(hit)
    return ((ci + c0) * env.ny + (ri + r0)).tolist()
