"""Maximum-profit pickup routing: randomized construction, exact oracle, experiments."""

from mprp.model import (
    Instance,
    ProfitConfig,
    Site,
    Solution,
    VehicleState,
    arrival_time,
    check_feasible,
    distance,
    evaluate_profit,
)
from mprp.generator import GenParams, generate, validate_assumptions
from mprp.solver import SolverConfig, solve, solve_best_of
from mprp.oracle import OracleLimits, best_single_route, brute_force_opt, greedy_construct

__all__ = [
    "Instance",
    "ProfitConfig",
    "Site",
    "Solution",
    "VehicleState",
    "arrival_time",
    "check_feasible",
    "distance",
    "evaluate_profit",
    "GenParams",
    "generate",
    "validate_assumptions",
    "SolverConfig",
    "solve",
    "solve_best_of",
    "OracleLimits",
    "best_single_route",
    "brute_force_opt",
    "greedy_construct",
]
