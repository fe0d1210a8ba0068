"""Exact optimum for small instances, and deterministic greedy baselines.

Single-vehicle routes are solved by dynamic programming over
(visited subset, last site) states. Each state keeps a Pareto set of labels
(clock, travelled length): profit depends on length, feasibility of later
visits depends on clock, and waiting decouples the two, so neither an earlier
clock nor a shorter length dominates on its own. A label is discarded only
when another label for the same state is no later and no longer.

The multi-vehicle optimum combines the per-subset single-route optima by
subset convolution over the fleet (vehicles are identical and independent).
"""

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from mprp.model import (
    TOL,
    Instance,
    LimitError,
    ModelError,
    ParamError,
    ProfitConfig,
    Solution,
    VehicleState,
    distance,
    evaluate_profit,
    route_profit,
)
from mprp.solver import SolverConfig, score

GREEDY_RULES = ("max_score", "nearest_feasible")


@dataclass(frozen=True)
class OracleLimits:
    max_sites_single_vehicle: int = 14
    max_sites_multi_vehicle: int = 9

    def __post_init__(self):
        if self.max_sites_single_vehicle < 1 or self.max_sites_multi_vehicle < 1:
            raise ParamError("oracle limits must be positive", "limits")
        if self.max_sites_multi_vehicle > self.max_sites_single_vehicle:
            raise ParamError("multi-vehicle limit exceeds single-vehicle limit", "limits")


@dataclass(frozen=True)
class OracleResult:
    profit: float
    routes: Tuple[Tuple[int, ...], ...]
    vehicle_profits: Tuple[float, ...]

    def to_solution(self, instance: Instance, config: ProfitConfig = ProfitConfig()) -> Solution:
        return Solution.from_routes(instance, self.routes, config)


def _route_table(
    instance: Instance, ids: Sequence[int], config: ProfitConfig
) -> Dict[int, Tuple[float, Tuple[int, ...]]]:
    """Best feasible route visiting exactly each reachable subset (bitmask over ``ids``)."""
    sites = [instance.site(i) for i in ids]
    k = len(sites)
    Q = instance.capacity
    dx, dy = instance.depot_x, instance.depot_y
    leg = [[distance(a.x, a.y, b.x, b.y) for b in sites] for a in sites]
    home = [distance(dx, dy, s.x, s.y) for s in sites]

    # labels[(mask, last)] -> list of (clock, length, route)
    labels: Dict[Tuple[int, int], List[Tuple[float, float, Tuple[int, ...]]]] = {}
    load = [0.0] * (1 << k)
    for mask in range(1, 1 << k):
        low = (mask & -mask).bit_length() - 1
        load[mask] = load[mask & (mask - 1)] + sites[low].quantity

    def push(key, clock, length, route):
        front = labels.setdefault(key, [])
        for c, l, _ in front:
            if c <= clock and l <= length:
                return
        front[:] = [lab for lab in front if not (clock <= lab[0] and length <= lab[1])]
        front.append((clock, length, route))

    for j, s in enumerate(sites):
        if home[j] <= s.window_end + TOL and s.quantity <= Q + TOL:
            push((1 << j, j), max(home[j], s.window_start), home[j], (s.id,))

    best: Dict[int, Tuple[float, Tuple[int, ...]]] = {0: (0.0, ())}
    for mask in range(1, 1 << k):
        for last in range(k):
            front = labels.get((mask, last))
            if not front:
                continue
            for clock, length, route in front:
                total = length + (home[last] if config.charge_return_leg else 0.0)
                value = load[mask] - total
                if mask not in best or value > best[mask][0]:
                    best[mask] = (value, route)
                for j in range(k):
                    bit = 1 << j
                    if mask & bit or load[mask | bit] > Q + TOL:
                        continue
                    s = sites[j]
                    reach = clock + leg[last][j]
                    if reach > s.window_end + TOL:
                        continue
                    push((mask | bit, j), max(reach, s.window_start), length + leg[last][j], route + (s.id,))
    return best


def _check_ids(instance: Instance, ids: Iterable[int]) -> List[int]:
    out = sorted(set(int(i) for i in ids))
    for i in out:
        instance.site(i)
    return out


def best_single_route(
    instance: Instance,
    allowed: Optional[Iterable[int]] = None,
    config: ProfitConfig = ProfitConfig(),
    limits: OracleLimits = OracleLimits(),
) -> Tuple[float, Tuple[int, ...]]:
    """Maximum profit of one vehicle restricted to ``allowed`` sites (all sites by default)."""
    ids = _check_ids(instance, [s.id for s in instance.sites] if allowed is None else allowed)
    if len(ids) > limits.max_sites_single_vehicle:
        raise LimitError(
            f"{len(ids)} sites exceed the single-vehicle oracle limit {limits.max_sites_single_vehicle}"
        )
    table = _route_table(instance, ids, config)
    value, route = max(table.values(), key=lambda item: item[0])
    return route_profit(instance, route, config), route


def brute_force_opt(
    instance: Instance,
    config: ProfitConfig = ProfitConfig(),
    limits: OracleLimits = OracleLimits(),
) -> OracleResult:
    """Exact optimum over all assignments of disjoint site subsets to the fleet."""
    n = instance.n
    if n > limits.max_sites_multi_vehicle:
        raise LimitError(f"{n} sites exceed the multi-vehicle oracle limit {limits.max_sites_multi_vehicle}")
    ids = sorted(s.id for s in instance.sites)
    table = _route_table(instance, ids, config)
    full = (1 << n) - 1

    # Best route using any subset of each mask; unassigned sites are allowed.
    sub: List[Tuple[float, int]] = [(0.0, 0)] * (full + 1)
    for mask in range(1, full + 1):
        best = (table[mask][0], mask) if mask in table else (float("-inf"), 0)
        m = mask
        while m:
            low = m & -m
            if sub[mask ^ low][0] > best[0]:
                best = sub[mask ^ low]
            m ^= low
        sub[mask] = best

    vehicles = min(instance.fleet_size, n)
    # f[mask] = best profit of `v` vehicles using sites within mask; choice[v][mask] = route mask of vehicle v.
    f = [sub[mask][0] for mask in range(full + 1)]
    choices = [[sub[mask][1] for mask in range(full + 1)]]
    for _ in range(1, vehicles):
        g = list(f)
        pick = [0] * (full + 1)
        for mask in range(full + 1):
            s = mask
            while s:
                value = sub[s][0] + f[mask ^ s]
                if value > g[mask]:
                    g[mask] = value
                    pick[mask] = sub[s][1]
                s = (s - 1) & mask
        f = g
        choices.append(pick)

    routes_masks = []
    mask = full
    for v in range(len(choices) - 1, 0, -1):
        r = choices[v][mask]
        routes_masks.append(r)
        mask ^= r
    if vehicles:
        routes_masks.append(choices[0][mask])
    routes = [table[r][1] for r in routes_masks if r]
    routes += [()] * (instance.fleet_size - len(routes))
    vehicle_profits = tuple(route_profit(instance, r, config) for r in routes)
    return OracleResult(evaluate_profit(instance, routes, config), tuple(routes), vehicle_profits)


def enumerate_single_route(
    instance: Instance, allowed: Iterable[int], config: ProfitConfig = ProfitConfig()
) -> Tuple[float, Tuple[int, ...]]:
    """Naive reference: try every ordering of every subset. Only for tiny inputs."""
    ids = _check_ids(instance, allowed)
    best = (0.0, ())
    for size in range(1, len(ids) + 1):
        for subset in combinations(ids, size):
            if sum(instance.site(i).quantity for i in subset) > instance.capacity + TOL:
                continue
            for order in permutations(subset):
                state = VehicleState.at_depot(0, instance)
                ok = True
                for i in order:
                    site = instance.site(i)
                    if state.clock + distance(state.last_x, state.last_y, site.x, site.y) > site.window_end + TOL:
                        ok = False
                        break
                    state.visit(site)
                if ok:
                    value = route_profit(instance, order, config)
                    if value > best[0]:
                        best = (value, tuple(order))
    return best


def greedy_construct(
    instance: Instance, rule: str = "max_score", config: SolverConfig = SolverConfig()
) -> Solution:
    """Deterministic construction: per vehicle, append the best positive-score site until none is left.

    ``max_score`` takes the highest score, ``nearest_feasible`` the closest
    positive-score site; ties go to the lowest id. Scoring always uses the
    repaired timing factor with negative scores clamped.
    """
    if rule not in GREEDY_RULES:
        raise ModelError(f"unknown greedy rule {rule!r}; expected one of {GREEDY_RULES}", "rule")
    scoring = SolverConfig(timing_variant="repaired", clamp_negative_profit_factor=True)
    unassigned = sorted(s.id for s in instance.sites)
    routes = []
    for k in range(instance.fleet_size):
        state = VehicleState.at_depot(k, instance)
        while unassigned:
            best_id, best_key = None, None
            for i in unassigned:
                site = instance.site(i)
                sigma = score(site, state, instance, scoring).score
                if sigma <= 0.0:
                    continue
                if rule == "max_score":
                    key = -sigma
                else:
                    key = distance(state.last_x, state.last_y, site.x, site.y)
                if best_key is None or key < best_key:
                    best_id, best_key = i, key
            if best_id is None:
                break
            state.visit(instance.site(best_id))
            unassigned.remove(best_id)
        routes.append(state.visited)
    return Solution.from_routes(instance, routes, config.profit_config)
