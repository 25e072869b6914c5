"""Two-layer (redundant) access-point placement on a gridded floor plan."""

from .config import ConfigError, PlanConfig, dump_config, load_config, parse_config, read_config
from .coverage import (CoverageMap, CoverageModel, FeasibilityReport, InfeasibleError, Solution,
                       build_coverage, is_feasible)
from .ga import EvolutionError, GaConfig, Individual, evolve, random_individual
from .geometry import GridEnvironment, Obstacle, Point2D, build_grid, place_random_obstacles
from .ghod import ghod_plan
from .propagation import RadioParams, covers, max_range, path_loss, received_power
from .reporting import BenchmarkTable, PlanReport, benchmark, heatmap, report
from .solve import ALGORITHMS, random_plan, solve

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS", "BenchmarkTable", "ConfigError", "CoverageMap", "CoverageModel",
    "EvolutionError", "FeasibilityReport", "GaConfig", "GridEnvironment", "Individual",
    "InfeasibleError", "Obstacle", "PlanConfig", "PlanReport", "Point2D", "RadioParams",
    "Solution", "benchmark", "build_coverage", "build_grid", "covers", "dump_config",
    "evolve", "ghod_plan", "heatmap", "is_feasible", "load_config", "max_range",
    "parse_config", "path_loss", "place_random_obstacles", "random_individual",
    "random_plan", "read_config", "received_power", "report", "solve",
]
