"""Grid discretization, obstacle footprints and line-of-sight blockage."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np


class Point2D(NamedTuple):
    x: float
    y: float


def lex_less(a: Point2D, b: Point2D) -> bool:
    """Lexicographic order on points: x first, then y."""
    return a[0] < b[0] or (a[0] == b[0] and a[1] < b[1])


@dataclass(frozen=True)
class Obstacle:
    """Axis-aligned rectangular footprint with a fixed penetration loss."""

    x0: float
    y0: float
    x1: float
    y1: float
    height: float = 9.0
    loss: float = 7.37

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError(f"degenerate obstacle footprint {self}")
        if self.loss < 0:
            raise ValueError(f"obstacle loss must be >= 0, got {self.loss}")

    def contains(self, x, y):
        """Closed-rectangle membership; works on scalars and arrays."""
        return (x >= self.x0) & (x <= self.x1) & (y >= self.y0) & (y <= self.y1)

    def as_row(self) -> tuple[float, ...]:
        return (self.x0, self.y0, self.x1, self.y1, self.height, self.loss)


@dataclass(frozen=True, eq=False)
class GridEnvironment:
    """A rectangle discretized into ``nx * ny`` grid points.

    Grid point ``g`` sits at column ``g // ny`` and row ``g % ny``, so the flat
    index order is the lexicographic order of the coordinates. ``obstacle_mask``
    has shape ``(nx, ny)`` and marks points taken up by obstacle footprints.
    """

    x_min: float
    y_min: float
    x_max: float
    y_max: float
    gs: float
    nx: int
    ny: int
    obstacle_mask: np.ndarray = field(repr=False)
    boundary_only: bool = False

    @property
    def size(self) -> int:
        return self.nx * self.ny

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def xs(self) -> np.ndarray:
        """Column coordinates."""
        return self.x_min + self.gs * np.arange(self.nx)

    @property
    def ys(self) -> np.ndarray:
        """Row coordinates."""
        return self.y_min + self.gs * np.arange(self.ny)

    @property
    def grid_points(self) -> list[Point2D]:
        xs, ys = self.xs, self.ys
        return [Point2D(float(x), float(y)) for x in xs for y in ys]

    @property
    def obstacle_index(self) -> frozenset[int]:
        return frozenset(np.flatnonzero(self.obstacle_mask).tolist())

    def point(self, g: int) -> Point2D:
        c, r = divmod(int(g), self.ny)
        return Point2D(self.x_min + c * self.gs, self.y_min + r * self.gs)

    def coords(self, indices) -> tuple[np.ndarray, np.ndarray]:
        c, r = np.divmod(np.asarray(indices, dtype=np.int64), self.ny)
        return self.x_min + c * self.gs, self.y_min + r * self.gs

    def contains(self, x: float, y: float) -> bool:
        """Placement bounds: the closed environment rectangle."""
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def locate(self, x: float, y: float, tol: float = 1e-6) -> int | None:
        """Index of the grid point at (x, y), or None if there is none."""
        c = (x - self.x_min) / self.gs
        r = (y - self.y_min) / self.gs
        ci, ri = round(c), round(r)
        if abs(c - ci) > tol or abs(r - ri) > tol:
            return None
        if not (0 <= ci < self.nx and 0 <= ri < self.ny):
            return None
        return ci * self.ny + ri

    def perimeter_mask(self) -> np.ndarray:
        m = np.zeros(self.shape, dtype=bool)
        m[0, :] = m[-1, :] = True
        m[:, 0] = m[:, -1] = True
        return m

    def with_obstacles(self, obstacles: Iterable[Obstacle]) -> GridEnvironment:
        """Copy of this environment with obstacle-occupied points excluded."""
        mask = self.obstacle_mask | footprint_mask(self, obstacles)
        mask.flags.writeable = False
        return GridEnvironment(self.x_min, self.y_min, self.x_max, self.y_max,
                               self.gs, self.nx, self.ny, mask, self.boundary_only)

    def with_boundary_only(self, flag: bool = True) -> GridEnvironment:
        return GridEnvironment(self.x_min, self.y_min, self.x_max, self.y_max,
                               self.gs, self.nx, self.ny, self.obstacle_mask, flag)


def build_grid(x_min: float, y_min: float, x_max: float, y_max: float, gs: float,
               boundary_only: bool = False) -> GridEnvironment:
    values = (x_min, y_min, x_max, y_max, gs)
    if not all(math.isfinite(v) for v in values):
        raise ValueError(f"non-finite grid parameters {values}")
    if not (x_max > x_min and y_max > y_min):
        raise ValueError(f"degenerate rectangle ({x_min}, {y_min})-({x_max}, {y_max})")
    if gs <= 0:
        raise ValueError(f"grid size must be positive, got {gs}")
    # 1e-9 absorbs float noise such as (0.3 - 0.0) / 0.1 = 2.9999999999999996
    nx = math.ceil((x_max - x_min) / gs - 1e-9)
    ny = math.ceil((y_max - y_min) / gs - 1e-9)
    mask = np.zeros((nx, ny), dtype=bool)
    mask.flags.writeable = False
    return GridEnvironment(x_min, y_min, x_max, y_max, gs, nx, ny, mask, boundary_only)


def footprint_mask(env: GridEnvironment, obstacles: Iterable[Obstacle]) -> np.ndarray:
    """Grid points lying in any closed obstacle footprint."""
    X, Y = np.meshgrid(env.xs, env.ys, indexing="ij")
    mask = np.zeros(env.shape, dtype=bool)
    for o in obstacles:
        mask |= o.contains(X, Y)
    return mask


def _slab(p, d, lo, hi, t0, t1):
    # One axis of Liang-Barsky clipping, inclusive on every boundary.
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        a = (lo - p) / d
        b = (hi - p) / d
    parallel = d == 0
    inside = (p >= lo) & (p <= hi)
    ta = np.where(parallel, np.where(inside, -np.inf, np.inf), np.minimum(a, b))
    tb = np.where(parallel, np.where(inside, np.inf, -np.inf), np.maximum(a, b))
    return np.maximum(t0, ta), np.minimum(t1, tb)


def segments_blocked(px, py, qx, qy, o: Obstacle) -> np.ndarray:
    """Vectorized closed segment / closed rectangle intersection test."""
    px, py, qx, qy = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (px, py, qx, qy)))
    # parametrize from the lex-smaller end so rounding cannot break symmetry
    swap = (qx < px) | ((qx == px) & (qy < py))
    px, qx = np.where(swap, qx, px), np.where(swap, px, qx)
    py, qy = np.where(swap, qy, py), np.where(swap, py, qy)
    t0 = np.zeros(px.shape)
    t1 = np.ones(px.shape)
    t0, t1 = _slab(px, qx - px, o.x0, o.x1, t0, t1)
    t0, t1 = _slab(py, qy - py, o.y0, o.y1, t0, t1)
    return t0 <= t1


def segment_blocked(p: Sequence[float], q: Sequence[float], o: Obstacle) -> bool:
    """True iff the segment p-q touches the footprint of ``o``."""
    return bool(segments_blocked(p[0], p[1], q[0], q[1], o))


def place_random_obstacles(env: GridEnvironment, count: int, length: float, width: float,
                           height: float, loss: float, seed: int) -> list[Obstacle]:
    """Drop ``count`` racks uniformly at random, horizontally or vertically.

    Footprints stay fully inside the environment and may overlap. Use
    ``env.with_obstacles`` to exclude the covered grid points.
    """
    if count < 0:
        raise ValueError("obstacle count must be >= 0")
    W = env.x_max - env.x_min
    H = env.y_max - env.y_min
    fits = {"h": length <= W and width <= H, "v": width <= W and length <= H}
    if count and not any(fits.values()):
        raise ValueError(f"a {length} x {width} m obstacle does not fit in {W} x {H} m")
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        orient = "h" if rng.random() < 0.5 else "v"
        if not fits[orient]:
            continue
        dx, dy = (length, width) if orient == "h" else (width, length)
        x0 = env.x_min + rng.uniform(0.0, W - dx)
        y0 = env.y_min + rng.uniform(0.0, H - dy)
        out.append(Obstacle(x0, y0, x0 + dx, y0 + dy, height, loss))
    return out


def obstacles_to_csv(obstacles: Iterable[Obstacle]) -> str:
    lines = ["x0,y0,x1,y1,height,loss"]
    lines += [",".join(f"{v:.6f}" for v in o.as_row()) for o in obstacles]
    return "\n".join(lines) + "\n"
