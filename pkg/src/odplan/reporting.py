"""Plan metrics, heat-map export and multi-seed benchmark tables."""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .coverage import (CoverageMap, CoverageModel, InfeasibleError, Solution, build_coverage,
                       closest_pair, is_feasible)
from .ga import EvolutionError, GaConfig
from .solve import solve


def _finite_or_none(v):
    return v if v is None or math.isfinite(v) else None


@dataclass(frozen=True)
class PlanReport:
    ap_count: int
    runtime_seconds: float
    pct_covered_at_least_twice: float
    pct_covered_more_than_twice: float
    min_inter_ap_separation: float
    min_received_power: float
    feasible: bool

    def to_json_dict(self) -> dict:
        d = asdict(self)
        for k in ("min_inter_ap_separation", "min_received_power"):
            d[k] = _finite_or_none(d[k])
        return d


def report(sol: Solution, cmap: CoverageMap, model: CoverageModel,
           runtime: float = 0.0) -> PlanReport:
    usable = model.usable
    counts = cmap.count[usable]
    n = max(counts.size, 1)
    xs, ys = model.env.coords(sol.indices)
    sep, _ = closest_pair(xs.tolist(), ys.tolist())
    power = cmap.best_power[usable]
    return PlanReport(
        ap_count=len(sol),
        runtime_seconds=float(runtime),
        pct_covered_at_least_twice=100.0 * np.count_nonzero(counts >= 2) / n,
        pct_covered_more_than_twice=100.0 * np.count_nonzero(counts > 2) / n,
        min_inter_ap_separation=float(sep),
        min_received_power=float(power.min()) if power.size else -math.inf,
        feasible=is_feasible(sol, model, cmap).ok,
    )


# -- heat maps --------------------------------------------------------------

def _jet(v: np.ndarray) -> np.ndarray:
    v = v[..., None]
    centers = np.array([3.0, 2.0, 1.0])
    return np.clip(1.5 - np.abs(4.0 * v - centers), 0.0, 1.0)


def heatmap_rgb(cmap: CoverageMap, model: CoverageModel) -> np.ndarray:
    """(ny, nx, 3) uint8 image: row 0 is y_min, column 0 is x_min."""
    p = model.params
    lo, hi = p.threshold, p.peak_power
    best = cmap.best_power
    covered = np.isfinite(best) & (best >= lo)
    v = np.clip((np.where(covered, best, lo) - lo) / (hi - lo), 0.0, 1.0)
    rgb = (_jet(v) * 255).round().astype(np.uint8)
    rgb[~covered] = 0
    rgb[~model.usable] = 255
    return np.ascontiguousarray(rgb.transpose(1, 0, 2))


def to_ppm(rgb: np.ndarray, scale: int = 1) -> bytes:
    if scale > 1:
        rgb = rgb.repeat(scale, axis=0).repeat(scale, axis=1)
    h, w, _ = rgb.shape
    return f"P6\n{w} {h}\n255\n".encode() + rgb.tobytes()


def coverage_csv(cmap: CoverageMap, model: CoverageModel) -> str:
    env = model.env
    xs, ys = env.coords(np.arange(env.size))
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["x", "y", "count", "best_power_dbm"])
    for x, y, c, b in zip(xs.tolist(), ys.tolist(), cmap.count.ravel().tolist(),
                          cmap.best_power.ravel().tolist()):
        w.writerow([f"{x:g}", f"{y:g}", c, f"{b:.6f}" if math.isfinite(b) else "-inf"])
    return out.getvalue()


def heatmap(cmap: CoverageMap, model: CoverageModel, scale: int = 1) -> tuple[bytes, str]:
    """Portable-pixmap raster plus exact per-point CSV."""
    return to_ppm(heatmap_rgb(cmap, model), scale), coverage_csv(cmap, model)


# -- benchmark -------------------------------------------------------------

@dataclass
class RunRecord:
    algorithm: str
    seed: int
    ap_count: int | None = None
    runtime_seconds: float = 0.0
    pct_covered_at_least_twice: float | None = None
    pct_covered_more_than_twice: float | None = None
    feasible: bool = False
    error: str = ""


@dataclass
class BenchmarkTable:
    runs: list[RunRecord] = field(default_factory=list)

    SUMMARY_FIELDS = ("algorithm", "runs", "failures", "ap_mean", "ap_std", "runtime_mean",
                      "runtime_std", "pct2_mean", "pct2_std", "pct3_mean", "pct3_std")

    def summary(self) -> list[dict]:
        rows = []
        for alg in dict.fromkeys(r.algorithm for r in self.runs):
            mine = [r for r in self.runs if r.algorithm == alg]
            ok = [r for r in mine if r.feasible]
            row = {"algorithm": alg, "runs": len(mine), "failures": len(mine) - len(ok)}
            for key, attr in (("ap", "ap_count"), ("runtime", "runtime_seconds"),
                              ("pct2", "pct_covered_at_least_twice"),
                              ("pct3", "pct_covered_more_than_twice")):
                vals = np.array([getattr(r, attr) for r in ok], dtype=float)
                row[f"{key}_mean"] = float(vals.mean()) if vals.size else math.nan
                row[f"{key}_std"] = float(vals.std()) if vals.size else math.nan
            rows.append(row)
        return rows

    def mean_ap(self, algorithm: str) -> float:
        return next(r["ap_mean"] for r in self.summary() if r["algorithm"] == algorithm)

    def runs_csv(self) -> str:
        out = io.StringIO()
        names = list(RunRecord.__dataclass_fields__)
        w = csv.DictWriter(out, names, lineterminator="\n")
        w.writeheader()
        for r in self.runs:
            w.writerow(asdict(r))
        return out.getvalue()

    def summary_csv(self) -> str:
        out = io.StringIO()
        w = csv.DictWriter(out, self.SUMMARY_FIELDS, lineterminator="\n")
        w.writeheader()
        for row in self.summary():
            w.writerow({k: (f"{v:.4f}" if isinstance(v, float) else v) for k, v in row.items()})
        return out.getvalue()

    def to_text(self) -> str:
        head = ("algorithm", "runs", "fail", "APs", "runtime s", "%>=2", "%>2")
        lines = ["{:<9} {:>5} {:>5} {:>13} {:>15} {:>13} {:>13}".format(*head)]
        for r in self.summary():
            lines.append("{:<9} {:>5} {:>5} {:>13} {:>15} {:>13} {:>13}".format(
                r["algorithm"], r["runs"], r["failures"],
                f"{r['ap_mean']:.2f}/{r['ap_std']:.2f}",
                f"{r['runtime_mean']:.3f}/{r['runtime_std']:.3f}",
                f"{r['pct2_mean']:.1f}/{r['pct2_std']:.1f}",
                f"{r['pct3_mean']:.1f}/{r['pct3_std']:.1f}"))
        return "\n".join(lines) + "\n"


def run_once(model: CoverageModel, algorithm: str, seed: int,
             cfg: GaConfig | None = None) -> RunRecord:
    t0 = time.perf_counter()
    try:
        sol = solve(model, algorithm, seed, cfg)
    except (InfeasibleError, EvolutionError) as e:
        return RunRecord(algorithm, seed, runtime_seconds=time.perf_counter() - t0, error=str(e))
    dt = time.perf_counter() - t0
    rep = report(sol, build_coverage(sol, model), model, dt)
    return RunRecord(algorithm, seed, rep.ap_count, dt, rep.pct_covered_at_least_twice,
                     rep.pct_covered_more_than_twice, rep.feasible,
                     "" if rep.feasible else "infeasible output")


def benchmark(model: CoverageModel, algorithms: Sequence[str], seeds: Sequence[int],
              cfg: GaConfig | None = None, workers: int = 1) -> BenchmarkTable:
    """Run every (algorithm, seed) pair; infeasible runs are flagged, not averaged."""
    if not seeds:
        raise ValueError("benchmark needs at least one seed")
    jobs = [(a, s) for a in algorithms for s in seeds]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            runs = list(pool.map(lambda job: run_once(model, job[0], job[1], cfg), jobs))
    else:
        runs = [run_once(model, a, s, cfg) for a, s in jobs]
    return BenchmarkTable(runs)
