"""One-slope path loss with obstacle losses and the downlink link budget."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .geometry import GridEnvironment, Obstacle, segment_blocked

# Slack on the threshold comparison so scalar and vectorized paths agree at the
# coverage boundary despite last-ulp differences in log10.
COVER_EPS = 1e-9


@dataclass(frozen=True)
class RadioParams:
    pl0: float = 39.87
    n: float = 1.78
    tp_max: float = 7.0
    gain_tx: float = 3.0
    gain_rx: float = 2.15
    margin: float = 1.0
    threshold: float = -68.0
    d_ap_min: float = 5.0
    ap_height: float = 2.0
    rx_height: float = 1.4
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if not self.n > 0:
            raise ValueError(f"path-loss exponent must be positive, got {self.n}")
        if not math.isfinite(self.tp_max):
            raise ValueError("TP_max must be finite")
        if not self.d_ap_min > 0:
            raise ValueError(f"d_AP_min must be positive, got {self.d_ap_min}")
        if self.check and not self.d_ap_min < self.max_range / 2:
            raise ValueError(
                f"d_AP_min = {self.d_ap_min:g} m must be below d_max / 2 = "
                f"{self.max_range / 2:.2f} m (d_max = {self.max_range:.2f} m)")

    @property
    def gain(self) -> float:
        return self.gain_tx + self.gain_rx

    @property
    def budget(self) -> float:
        """Loss the link can absorb before falling under the threshold."""
        return self.tp_max + self.gain - self.margin - self.threshold

    @property
    def peak_power(self) -> float:
        """Received power at the 1 m reference distance."""
        return self.tp_max + self.gain - self.margin - self.pl0

    @cached_property
    def max_range(self) -> float:
        return 10 ** ((self.budget - self.pl0) / (10 * self.n))


def max_range(params: RadioParams) -> float:
    return params.max_range


def path_loss(d, obstacle_loss, params: RadioParams):
    """PL0 + 10 n log10(d) + obstacle loss, with d clamped to >= 1 m."""
    d = np.maximum(d, 1.0)
    out = params.pl0 + 10 * params.n * np.log10(d) + obstacle_loss
    return float(out) if np.ndim(out) == 0 else out


def obstacle_loss(p: Sequence[float], q: Sequence[float], obstacles: Sequence[Obstacle]) -> float:
    """Summed loss of every obstacle touching the segment p-q."""
    return float(sum(o.loss for o in obstacles if segment_blocked(p, q, o)))


def _gp_and_distance(g: int, ap: Sequence[float], env: GridEnvironment):
    gp = env.point(g)
    return gp, math.hypot(gp.x - ap[0], gp.y - ap[1])


def received_power(g: int, ap: Sequence[float], env: GridEnvironment,
                   obstacles: Sequence[Obstacle], params: RadioParams) -> float:
    gp, d = _gp_and_distance(g, ap, env)
    ol = obstacle_loss(gp, ap, obstacles)
    return params.tp_max + params.gain - params.margin - path_loss(d, ol, params)


def covers(g: int, ap: Sequence[float], env: GridEnvironment,
           obstacles: Sequence[Obstacle], params: RadioParams) -> bool:
    return received_power(g, ap, env, obstacles, params) >= params.threshold - COVER_EPS
