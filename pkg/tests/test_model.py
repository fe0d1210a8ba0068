import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_instance
from mprp.model import (
    Instance,
    ModelError,
    ParamError,
    ProfitConfig,
    Site,
    Solution,
    arrival_time,
    check_feasible,
    check_solution,
    distance,
    evaluate_profit,
    route_profit,
)

coord = st.floats(-1e3, 1e3, allow_nan=False)


@pytest.mark.parametrize(
    "a, b, expected",
    [((0, 0), (0, 0), 0.0), ((0, 0), (3, 4), 5.0), ((1, 1), (4, 5), 5.0)],
)
def test_distance_examples(a, b, expected):
    assert distance(*a, *b) == expected


@given(coord, coord, coord, coord, coord, coord)
def test_distance_metric(ax, ay, bx, by, cx, cy):
    ab = distance(ax, ay, bx, by)
    assert ab == distance(bx, by, ax, ay)
    assert distance(ax, ay, cx, cy) <= ab + distance(bx, by, cx, cy) + 1e-9
    assert (ab == 0) == (ax == bx and ay == by)


def test_triangle_inequality_bulk():
    import numpy as np

    rng = np.random.default_rng(11)
    pts = rng.uniform(-100, 100, size=(10_000, 3, 2))
    for (a, b, c) in pts:
        assert distance(*a, *c) <= distance(*a, *b) + distance(*b, *c) + 1e-9
        assert math.isclose(distance(*a, *b), distance(*b, *a), abs_tol=1e-9)


@pytest.mark.parametrize(
    "clock, travel, start, expected", [(0, 4, 0, 4), (2, 3, 10, 10), (10, 0, 10, 10)]
)
def test_arrival_time_examples(clock, travel, start, expected):
    assert arrival_time(clock, travel, start) == expected


@given(st.floats(0, 1e3), st.floats(0, 1e3), st.floats(0, 1e3), st.floats(0, 10), st.floats(0, 10))
def test_arrival_time_monotone(clock, travel, start, dc, dt):
    base = arrival_time(clock, travel, start)
    assert arrival_time(clock + dc, travel, start) >= base
    assert arrival_time(clock, travel + dt, start) >= base
    assert base >= start


def test_evaluate_profit_examples():
    at_depot = make_instance([(0, 0, 0, 100, 5)])
    far = make_instance([(3, 4, 0, 100, 20)])
    assert evaluate_profit(at_depot, [[]]) == 0
    assert evaluate_profit(at_depot, [[0]]) == 5
    assert evaluate_profit(far, [[0]]) == 10
    assert evaluate_profit(far, [[0]], ProfitConfig(charge_return_leg=False)) == 15


def test_evaluate_profit_unknown_site():
    inst = make_instance([(3, 4, 0, 100, 20)])
    with pytest.raises(ModelError, match="7"):
        evaluate_profit(inst, [[7]])


def test_evaluate_profit_additive(preset_instance):
    from mprp.solver import solve

    routes = solve(preset_instance, 3).routes
    total = evaluate_profit(preset_instance, routes)
    assert total == pytest.approx(sum(route_profit(preset_instance, r) for r in routes), abs=1e-9)


def test_check_feasible_empty():
    inst = make_instance([(3, 4, 0, 100, 20)], m=2)
    assert check_feasible(inst, [[], []]).feasible


def test_check_feasible_late_second_visit():
    inst = make_instance([(3, 4, 0, 100, 1), (6, 8, 0, 9, 1)])
    report = check_feasible(inst, [[0, 1]])
    assert not report.feasible
    [v] = report.violations
    assert (v.kind, v.position, v.site_id) == ("window_late", 2, 1)


def test_check_feasible_waiting_is_legal():
    inst = make_instance([(3, 4, 50, 60, 1)])
    assert check_feasible(inst, [[0]]).feasible


def test_check_feasible_boundary_arrival():
    inst = make_instance([(3, 4, 0, 5, 1)])
    assert check_feasible(inst, [[0]]).feasible


def test_check_feasible_capacity():
    inst = make_instance([(1, 0, 0, 100, 6), (2, 0, 0, 100, 5)], capacity=10)
    [v] = check_feasible(inst, [[0, 1]]).violations
    assert (v.kind, v.position) == ("capacity", 2)


def test_check_feasible_duplicate_unknown_and_fleet():
    inst = make_instance([(1, 0, 0, 100, 1), (2, 0, 0, 100, 1)], m=1)
    kinds = {v.kind for v in check_feasible(inst, [[0, 0, 5], [1]]).violations}
    assert kinds == {"duplicate_site", "unknown_site", "fleet_size"}


def test_check_solution_recorded_times():
    inst = make_instance([(3, 4, 10, 20, 1)])
    good = Solution.from_routes(inst, [[0]])
    assert good.arrival_times == ((10.0,),)
    assert check_solution(inst, good).feasible
    early = Solution(((0,),), ((5.0,),), good.profit)
    assert [v.kind for v in check_solution(inst, early).violations] == ["window_early"]


@pytest.mark.parametrize(
    "kwargs, path",
    [
        (dict(fleet_size=0), "fleet_size"),
        (dict(capacity=0.0), "capacity"),
        (dict(horizon=-1.0), "horizon"),
    ],
)
def test_instance_param_errors(kwargs, path):
    base = dict(sites=(), depot_x=0.0, depot_y=0.0, fleet_size=1, capacity=1.0, horizon=1.0)
    base.update(kwargs)
    with pytest.raises(ParamError) as err:
        Instance(**base)
    assert err.value.path == path


def test_instance_site_invariants():
    with pytest.raises(ModelError, match="window"):
        Site(0, 0, 0, 5, 3, 1)
    with pytest.raises(ModelError, match="quantity"):
        Site(0, 0, 0, 0, 3, -1)
    with pytest.raises(ModelError) as err:
        make_instance([(0, 0, 0, 200, 1)], horizon=100)
    assert err.value.path == "sites[0].window"
    with pytest.raises(ModelError, match="duplicate"):
        Instance((Site(0, 0, 0, 0, 1, 1), Site(0, 1, 1, 0, 1, 1)), 0, 0, 1, 1, 10)
    with pytest.raises(ModelError, match="outside"):
        Instance((Site(3, 0, 0, 0, 1, 1),), 0, 0, 1, 1, 10)
