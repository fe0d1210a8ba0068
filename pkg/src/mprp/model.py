"""Problem data model, geometry, feasibility checking and profit evaluation.

Every solver and test in the package shares these definitions. Coordinates are
planar, vehicles travel at unit speed, so a leg length is also its travel time.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np

# Absolute tolerance for boundary comparisons (arrival exactly at window_end is feasible).
TOL = 1e-9

Routes = Sequence[Sequence[int]]


class MPRPError(Exception):
    """Base class for all package errors."""


class ModelError(MPRPError, ValueError):
    """Invalid problem data. ``path`` locates the offending field, e.g. ``sites[3].window``."""

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ParamError(ModelError):
    """A parameter is outside its allowed range."""


class LimitError(MPRPError, ValueError):
    """Input exceeds a size limit (oracle enumeration)."""


def _finite(value, path: str) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ModelError(f"expected a number, got {value!r}", path) from None
    if not math.isfinite(value):
        raise ModelError(f"expected a finite number, got {value!r}", path)
    return value


@dataclass(frozen=True)
class Site:
    id: int
    x: float
    y: float
    window_start: float
    window_end: float
    quantity: float

    def __post_init__(self):
        if isinstance(self.id, bool) or not isinstance(self.id, (int, np.integer)):
            raise ModelError(f"site id must be an integer, got {self.id!r}", "id")
        object.__setattr__(self, "id", int(self.id))
        for name in ("x", "y", "window_start", "window_end", "quantity"):
            object.__setattr__(self, name, _finite(getattr(self, name), name))
        if self.quantity < 0:
            raise ModelError(f"quantity must be >= 0, got {self.quantity}", "quantity")
        if self.window_start < 0 or self.window_start > self.window_end:
            raise ModelError(
                f"need 0 <= start <= end, got [{self.window_start}, {self.window_end}]", "window"
            )


@dataclass(frozen=True)
class Instance:
    """Depot, sites, fleet of ``fleet_size`` vehicles of capacity ``capacity``, horizon ``horizon``."""

    sites: Tuple[Site, ...]
    depot_x: float
    depot_y: float
    fleet_size: int
    capacity: float
    horizon: float

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(self.sites))
        object.__setattr__(self, "depot_x", _finite(self.depot_x, "depot[0]"))
        object.__setattr__(self, "depot_y", _finite(self.depot_y, "depot[1]"))
        object.__setattr__(self, "capacity", _finite(self.capacity, "capacity"))
        object.__setattr__(self, "horizon", _finite(self.horizon, "horizon"))
        if isinstance(self.fleet_size, bool) or not isinstance(self.fleet_size, (int, np.integer)):
            raise ParamError(f"must be an integer, got {self.fleet_size!r}", "fleet_size")
        object.__setattr__(self, "fleet_size", int(self.fleet_size))
        if self.fleet_size < 1:
            raise ParamError(f"must be >= 1, got {self.fleet_size}", "fleet_size")
        if self.capacity <= 0:
            raise ParamError(f"must be > 0, got {self.capacity}", "capacity")
        if self.horizon <= 0:
            raise ParamError(f"must be > 0, got {self.horizon}", "horizon")
        n = len(self.sites)
        seen = set()
        for i, site in enumerate(self.sites):
            if not isinstance(site, Site):
                raise ModelError(f"expected Site, got {type(site).__name__}", f"sites[{i}]")
            if not 0 <= site.id < n:
                raise ModelError(f"id {site.id} outside [0, {n})", f"sites[{i}].id")
            if site.id in seen:
                raise ModelError(f"duplicate id {site.id}", f"sites[{i}].id")
            seen.add(site.id)
            if site.window_end > self.horizon:
                raise ModelError(
                    f"window end {site.window_end} exceeds horizon {self.horizon}",
                    f"sites[{i}].window",
                )

    @property
    def n(self) -> int:
        return len(self.sites)

    @cached_property
    def by_id(self) -> dict:
        return {s.id: s for s in self.sites}

    @cached_property
    def arrays(self) -> "SiteArrays":
        """Column view of the sites, indexed by site id."""
        order = sorted(self.sites, key=lambda s: s.id)
        cols = np.array(
            [[s.x, s.y, s.window_start, s.window_end, s.quantity] for s in order], dtype=float
        ).reshape(-1, 5)
        return SiteArrays(*(np.ascontiguousarray(cols[:, j]) for j in range(5)))

    def site(self, site_id: int) -> Site:
        try:
            return self.by_id[site_id]
        except KeyError:
            raise ModelError(f"unknown site id {site_id!r}") from None

    def depot_distance(self, site: Site) -> float:
        return distance(self.depot_x, self.depot_y, site.x, site.y)


@dataclass(frozen=True)
class SiteArrays:
    x: np.ndarray
    y: np.ndarray
    start: np.ndarray
    end: np.ndarray
    quantity: np.ndarray


@dataclass
class VehicleState:
    """Mutable construction state of one vehicle; confined to a single solver run."""

    vehicle_index: int
    visited: List[int] = field(default_factory=list)
    load: float = 0.0
    clock: float = 0.0
    last_x: float = 0.0
    last_y: float = 0.0

    @classmethod
    def at_depot(cls, vehicle_index: int, instance: Instance) -> "VehicleState":
        return cls(vehicle_index, [], 0.0, 0.0, instance.depot_x, instance.depot_y)

    def visit(self, site: Site) -> None:
        travel = distance(self.last_x, self.last_y, site.x, site.y)
        self.clock = arrival_time(self.clock, travel, site.window_start)
        self.load += site.quantity
        self.last_x, self.last_y = site.x, site.y
        self.visited.append(site.id)


@dataclass(frozen=True)
class ProfitConfig:
    # Charge the last-site -> depot leg. False reproduces the analysis' accounting.
    charge_return_leg: bool = True


@dataclass(frozen=True)
class Solution:
    routes: Tuple[Tuple[int, ...], ...]
    arrival_times: Tuple[Tuple[float, ...], ...]
    profit: float
    seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "routes", tuple(tuple(int(i) for i in r) for r in self.routes))
        object.__setattr__(
            self, "arrival_times", tuple(tuple(float(t) for t in r) for r in self.arrival_times)
        )
        object.__setattr__(self, "profit", float(self.profit))
        if len(self.routes) != len(self.arrival_times) or any(
            len(r) != len(t) for r, t in zip(self.routes, self.arrival_times)
        ):
            raise ModelError("arrival_times must mirror routes", "arrival_times")

    @classmethod
    def from_routes(
        cls,
        instance: Instance,
        routes: Routes,
        config: ProfitConfig = ProfitConfig(),
        seed: Optional[int] = None,
    ) -> "Solution":
        """Build a solution, computing arrival times and profit from the routes."""
        return cls(
            routes=tuple(tuple(r) for r in routes),
            arrival_times=tuple(route_arrivals(instance, r) for r in routes),
            profit=evaluate_profit(instance, routes, config),
            seed=seed,
        )

    @property
    def visited(self) -> List[int]:
        return [i for r in self.routes for i in r]


@dataclass(frozen=True)
class Violation:
    route: int
    # 1-based index of the visit within its route.
    position: int
    kind: str
    site_id: Optional[int] = None
    detail: str = ""


VIOLATION_KINDS = (
    "window_early",
    "window_late",
    "capacity",
    "duplicate_site",
    "unknown_site",
    "fleet_size",
)


@dataclass(frozen=True)
class FeasibilityReport:
    violations: Tuple[Violation, ...] = ()

    @property
    def feasible(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.feasible


def distance(ax: float, ay: float, bx: float, by: float) -> float:
    return math.hypot(bx - ax, by - ay)


def arrival_time(clock: float, travel: float, window_start: float) -> float:
    """Service start time: arrive after ``travel`` and wait for the window to open."""
    return max(clock + travel, window_start)


def route_arrivals(instance: Instance, route: Sequence[int]) -> Tuple[float, ...]:
    """Service start times along ``route`` from the depot at clock 0."""
    state = VehicleState.at_depot(0, instance)
    times = []
    for site_id in route:
        state.visit(instance.site(site_id))
        times.append(state.clock)
    return tuple(times)


def route_profit(instance: Instance, route: Sequence[int], config: ProfitConfig = ProfitConfig()) -> float:
    if not route:
        return 0.0
    collected = 0.0
    travel = 0.0
    x, y = instance.depot_x, instance.depot_y
    for site_id in route:
        site = instance.site(site_id)
        collected += site.quantity
        travel += distance(x, y, site.x, site.y)
        x, y = site.x, site.y
    if config.charge_return_leg:
        travel += distance(x, y, instance.depot_x, instance.depot_y)
    return collected - travel


def evaluate_profit(instance: Instance, routes: Routes, config: ProfitConfig = ProfitConfig()) -> float:
    """Total quantity collected minus total distance travelled, summed over routes."""
    return math.fsum(route_profit(instance, r, config) for r in routes)


def check_feasible(instance: Instance, routes: Routes) -> FeasibilityReport:
    """Simulate every route from the depot at clock 0 and collect all violations.

    Waiting for a window to open is legal. Unknown and duplicate visits are
    recorded and then skipped, so they do not move the clock or the load.
    """
    violations = []
    nonempty = [k for k, r in enumerate(routes) if len(r)]
    if len(nonempty) > instance.fleet_size:
        violations.append(
            Violation(
                nonempty[instance.fleet_size],
                0,
                "fleet_size",
                detail=f"{len(nonempty)} non-empty routes for {instance.fleet_size} vehicles",
            )
        )
    seen = set()
    for k, route in enumerate(routes):
        state = VehicleState.at_depot(k, instance)
        over_capacity = False
        for pos, site_id in enumerate(route, start=1):
            site = instance.by_id.get(site_id) if isinstance(site_id, (int, np.integer)) else None
            if site is None:
                violations.append(Violation(k, pos, "unknown_site", site_id, "no such site"))
                continue
            if site.id in seen:
                violations.append(Violation(k, pos, "duplicate_site", site.id, "already visited"))
                continue
            seen.add(site.id)
            reach = state.clock + distance(state.last_x, state.last_y, site.x, site.y)
            if reach > site.window_end + TOL:
                violations.append(
                    Violation(k, pos, "window_late", site.id, f"arrive {reach} > end {site.window_end}")
                )
            state.visit(site)
            if not over_capacity and state.load > instance.capacity + TOL:
                over_capacity = True
                violations.append(
                    Violation(k, pos, "capacity", site.id, f"load {state.load} > {instance.capacity}")
                )
    return FeasibilityReport(tuple(violations))


def check_solution(instance: Instance, solution: Solution) -> FeasibilityReport:
    """Route feasibility plus the recorded arrival times against each window."""
    violations = list(check_feasible(instance, solution.routes).violations)
    for k, (route, times) in enumerate(zip(solution.routes, solution.arrival_times)):
        for pos, (site_id, t) in enumerate(zip(route, times), start=1):
            site = instance.by_id.get(site_id)
            if site is None:
                continue
            if t < site.window_start - TOL:
                violations.append(Violation(k, pos, "window_early", site_id, f"recorded {t}"))
            elif t > site.window_end + TOL:
                violations.append(Violation(k, pos, "window_late", site_id, f"recorded {t}"))
    return FeasibilityReport(tuple(violations))


def profit_upper_bound(instance: Instance) -> float:
    """min(total supply, m * Q): no solution can collect more."""
    supply = math.fsum(s.quantity for s in instance.sites)
    return min(supply, instance.fleet_size * instance.capacity)


def empty_routes(instance: Instance) -> List[List[int]]:
    return [[] for _ in range(instance.fleet_size)]
