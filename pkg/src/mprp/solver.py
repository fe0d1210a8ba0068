"""Monte Carlo route construction.

For each vehicle in turn, every unassigned site gets a score

    score = profit_factor * storage_factor * timing_factor

and is admitted to a candidate set by an independent Bernoulli draw with
probability score / sum(scores). One candidate is then picked uniformly and
appended to the route. An empty candidate set is redrawn up to
``max_empty_retries`` times while some probability is positive; the vehicle
is retired when every probability is zero or the retries run out.

A site with score 0 is never drawn, and every factor is 0 for a site that would
break its window or the capacity, so emitted routes are feasible by construction.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Mapping, Optional, Sequence

import numpy as np

from mprp.model import (
    TOL,
    Instance,
    MPRPError,
    ParamError,
    ProfitConfig,
    Site,
    Solution,
    VehicleState,
    distance,
)
from mprp.seeding import check_seed, derive_seed, make_rng

TIMING_VARIANTS = ("repaired", "literal")


@dataclass(frozen=True)
class SolverConfig:
    # "repaired": 1 before the window, linear decay inside it, 0 after.
    # "literal": the unrepaired ratio (e - a) / (s - a), clipped, plus a hard mask on late arrivals.
    timing_variant: str = "repaired"
    clamp_negative_profit_factor: bool = True
    # None means n, the number of sites.
    max_empty_retries: Optional[int] = None
    charge_return_leg: bool = True
    # Normalize by the score sum taken once at route start instead of every iteration.
    frozen_denominator: bool = False

    def __post_init__(self):
        if self.timing_variant not in TIMING_VARIANTS:
            raise ParamError(f"must be one of {TIMING_VARIANTS}, got {self.timing_variant!r}", "timing_variant")
        if self.max_empty_retries is not None and (
            isinstance(self.max_empty_retries, bool)
            or not isinstance(self.max_empty_retries, int)
            or self.max_empty_retries < 0
        ):
            raise ParamError(f"must be a non-negative integer, got {self.max_empty_retries!r}", "max_empty_retries")

    @property
    def profit_config(self) -> ProfitConfig:
        return ProfitConfig(self.charge_return_leg)

    def retries_for(self, instance: Instance) -> int:
        return instance.n if self.max_empty_retries is None else self.max_empty_retries


class ContractError(MPRPError, RuntimeError):
    """An operation was called outside its precondition."""


@dataclass(frozen=True)
class ScoreBreakdown:
    profit_factor: float
    storage_factor: float
    timing_factor: float
    score: float


def _travel(site: Site, state: VehicleState) -> float:
    return distance(state.last_x, state.last_y, site.x, site.y)


def profit_factor(site: Site, state: VehicleState, instance: Instance) -> float:
    return (site.quantity - _travel(site, state)) / instance.capacity


def storage_factor(site: Site, state: VehicleState, instance: Instance) -> float:
    return max(0.0, (instance.capacity - site.quantity - state.load) / instance.capacity)


def timing_factor(site: Site, state: VehicleState, variant: str = "repaired") -> float:
    a = state.clock + _travel(site, state)
    s, e = site.window_start, site.window_end
    if a > e + TOL:
        return 0.0
    if variant == "repaired":
        if a <= s:
            return 1.0
        if a >= e:
            return 0.0
        return (e - a) / (e - s)
    if variant == "literal":
        if a == s:
            return 1.0
        return max(0.0, min(1.0, (e - a) / (s - a)))
    raise ParamError(f"unknown timing variant {variant!r}", "timing_variant")


def score(site: Site, state: VehicleState, instance: Instance, config: SolverConfig = SolverConfig()) -> ScoreBreakdown:
    p = profit_factor(site, state, instance)
    s = storage_factor(site, state, instance)
    t = timing_factor(site, state, config.timing_variant)
    sigma = p * s * t
    if config.clamp_negative_profit_factor:
        sigma = max(0.0, sigma)
    return ScoreBreakdown(p, s, t, sigma)


class _Scorer:
    """Vectorized ``score`` over every site of an instance, built once per solve."""

    def __init__(self, instance: Instance, config: SolverConfig):
        a = instance.arrays
        self.capacity = instance.capacity
        self.repaired = config.timing_variant == "repaired"
        self.clamp = config.clamp_negative_profit_factor
        self.x, self.y, self.start, self.end = a.x, a.y, a.start, a.end
        self.q_frac = a.quantity / instance.capacity
        span = a.end - a.start
        self.point = span <= 0.0
        self.has_point = bool(self.point.any())
        with np.errstate(divide="ignore"):
            self.inv_span = np.where(self.point, 0.0, 1.0 / np.where(self.point, 1.0, span))

    def __call__(self, state: VehicleState, available: Optional[np.ndarray] = None) -> np.ndarray:
        d = np.hypot(self.x - state.last_x, self.y - state.last_y)
        arrive = d + state.clock
        if self.repaired:
            tf = np.clip((self.end - arrive) * self.inv_span, 0.0, 1.0)
            if self.has_point:
                tf[self.point] = arrive[self.point] <= self.start[self.point]
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                tf = np.clip((self.end - arrive) / (self.start - arrive), 0.0, 1.0)
            tf[arrive == self.start] = 1.0
            tf[arrive > self.end + TOL] = 0.0
        room = (self.capacity - state.load) / self.capacity
        sigma = (self.q_frac - d / self.capacity) * np.maximum(room - self.q_frac, 0.0) * tf
        if self.clamp:
            np.maximum(sigma, 0.0, out=sigma)
        if available is not None:
            sigma[~available] = 0.0
        return sigma


def score_arrays(ids: np.ndarray, state: VehicleState, instance: Instance, config: SolverConfig) -> np.ndarray:
    """Vectorized ``score``: the sigma of each site in ``ids``."""
    return _Scorer(instance, config)(state)[np.asarray(ids, dtype=np.intp)]


def _normalize(sigma: np.ndarray, denominator: Optional[float]) -> np.ndarray:
    if denominator is None:
        total = float(sigma.sum())
        if total <= 0.0:
            return np.zeros_like(sigma)
        return np.maximum(sigma, 0.0) / total
    if denominator <= 0.0:
        return np.zeros_like(sigma)
    return np.clip(sigma / denominator, 0.0, 1.0)


def selection_probabilities(
    unassigned: Sequence[int],
    state: VehicleState,
    instance: Instance,
    config: SolverConfig = SolverConfig(),
    denominator: Optional[float] = None,
) -> Mapping[int, float]:
    """Per-site admission probabilities, keyed by site id.

    With a fresh denominator (the default) the probabilities sum to 1 whenever
    any score is positive. Passing ``denominator`` reproduces frozen-denominator
    mode, where the route-start sum is reused and results are clamped to [0, 1].
    Sites with non-positive score always get probability 0.
    """
    ids = np.asarray(sorted(unassigned), dtype=np.intp)
    sigma = score_arrays(ids, state, instance, config)
    probs = _normalize(sigma, denominator)
    return {int(i): float(p) for i, p in zip(ids, probs)}


def build_candidate_set(probabilities: Mapping[int, float], rng: np.random.Generator) -> List[int]:
    """Independent Bernoulli draw per site (in ascending id order); returns the admitted ids."""
    ids = sorted(probabilities)
    p = np.array([probabilities[i] for i in ids], dtype=float)
    hits = rng.random(len(ids)) < p
    return [i for i, hit in zip(ids, hits) if hit]


def assign_step(candidates: Sequence[int], state: VehicleState, instance: Instance, rng: np.random.Generator) -> VehicleState:
    """Append a uniformly chosen candidate to the route, updating load, clock and position."""
    if len(candidates) == 0:
        raise ContractError("assign_step needs a non-empty candidate set")
    chosen = candidates[int(rng.integers(len(candidates)))]
    state.visit(instance.site(int(chosen)))
    return state


@dataclass
class IterationRecord:
    """One probability evaluation during ``solve``; passed to the ``trace`` hook."""

    vehicle: int
    site_ids: np.ndarray
    scores: np.ndarray
    probabilities: np.ndarray
    draws: List[np.ndarray] = field(default_factory=list)
    chosen: Optional[int] = None


def solve(
    instance: Instance,
    seed: int = 0,
    config: SolverConfig = SolverConfig(),
    trace: Optional[Callable[[IterationRecord], None]] = None,
) -> Solution:
    """One randomized construction. Deterministic in (instance, seed, config)."""
    rng = make_rng(seed)
    scorer = _Scorer(instance, config)
    available = np.ones(instance.n, dtype=bool)
    remaining = instance.n
    max_retries = config.retries_for(instance)
    routes = []
    for k in range(instance.fleet_size):
        state = VehicleState.at_depot(k, instance)
        denominator = None
        if config.frozen_denominator:
            denominator = float(scorer(state, available).sum())
        while remaining:
            sigma = scorer(state, available)
            probs = _normalize(sigma, denominator)
            record = None
            if trace is not None:
                ids = np.flatnonzero(available)
                record = IterationRecord(k, ids, sigma[ids], probs[ids])
            if not probs.any():
                if record is not None:
                    trace(record)
                break
            hits = None
            for _ in range(max_retries + 1):
                hits = np.flatnonzero(rng.random(probs.size) < probs)
                if record is not None:
                    record.draws.append(hits)
                if hits.size:
                    break
            if not hits.size:
                if record is not None:
                    trace(record)
                break
            chosen = int(hits[int(rng.integers(hits.size))])
            if record is not None:
                record.chosen = chosen
                trace(record)
            state.visit(instance.site(chosen))
            available[chosen] = False
            remaining -= 1
        routes.append(state.visited)
    return Solution.from_routes(instance, routes, config.profit_config, seed=seed)


def restart_seeds(base_seed: int, restarts: int) -> List[int]:
    """Seed of restart 0 is ``base_seed``; restart r >= 1 uses ``derive_seed(base_seed, r)``."""
    base_seed = check_seed(base_seed, "base_seed")
    return [base_seed] + [derive_seed(base_seed, r) for r in range(1, restarts)]


def solve_best_of(
    instance: Instance,
    base_seed: int = 0,
    restarts: int = 1,
    config: SolverConfig = SolverConfig(),
) -> Solution:
    """Best profit over ``restarts`` independent runs; ties go to the earliest restart."""
    if isinstance(restarts, bool) or not isinstance(restarts, int) or restarts < 1:
        raise ParamError(f"must be an integer >= 1, got {restarts!r}", "restarts")
    best = None
    for seed in restart_seeds(base_seed, restarts):
        sol = solve(instance, seed, config)
        if best is None or sol.profit > best.profit:
            best = sol
    return best
