import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_instance
from mprp.generator import GenParams, generate, ks_uniform, validate_assumptions
from mprp.model import ParamError


def test_single_site_bounds():
    for seed in range(50):
        inst = generate(GenParams(n=1, m=1, capacity=10.0, horizon=40.0, seed=seed))
        [site] = inst.sites
        assert 0 <= site.window_start <= 30.0
        assert site.window_start <= site.window_end <= 40.0
        assert math.hypot(site.x, site.y) <= 10.0 + 1e-12
        assert (inst.depot_x, inst.depot_y) == (0.0, 0.0)


def test_deterministic_per_seed():
    p = GenParams(n=30, seed=123)
    assert generate(p) == generate(p)
    assert generate(p) != generate(p.replace(seed=124))


def test_sites_are_stream_prefixes():
    # Site i reads a fixed block of the stream, so locations and windows do not depend on n.
    small = generate(GenParams(n=5, seed=9))
    large = generate(GenParams(n=40, seed=9))
    for a, b in zip(small.sites, large.sites):
        assert (a.x, a.y, a.window_start, a.window_end) == (b.x, b.y, b.window_start, b.window_end)


def test_moments_single_seed():
    inst = generate(GenParams(n=1000, m=5, capacity=10000.0, horizon=100.0, seed=0))
    rep = validate_assumptions(inst)
    assert rep.stats["window_start"].mean == pytest.approx(37.5, abs=1.5)
    assert rep.stats["depot_distance"].mean == pytest.approx(12.5, abs=0.7)
    assert rep.stats["quantity"].mean == pytest.approx(10.0, abs=1.0)
    assert rep.max_abs_z < 5


def test_ks_matches_scipy():
    inst = generate(GenParams(n=500, seed=4))
    starts = inst.arrays.start
    ours = ks_uniform(starts, 0.0, 75.0)
    ref = scipy.stats.kstest(starts, scipy.stats.uniform(0, 75).cdf).statistic
    assert ours == pytest.approx(ref, abs=1e-12)


def test_ks_window_start_10k_sites():
    inst = generate(GenParams(n=10_000, capacity=1e6, seed=2))
    assert validate_assumptions(inst).ks_window_start < 0.05


def test_window_end_conditional():
    # e ~ U(s, T): (e - s) / (T - s) is U(0, 1) independent of s.
    inst = generate(GenParams(n=5000, capacity=1e6, seed=5))
    a = inst.arrays
    u = (a.end - a.start) / (inst.horizon - a.start)
    assert scipy.stats.kstest(u, "uniform").statistic < 0.03
    assert abs(np.corrcoef(u, a.start)[0, 1]) < 0.05


def test_radius_uniform_not_area_uniform():
    inst = generate(GenParams(n=5000, capacity=1e6, seed=6))
    r = np.hypot(inst.arrays.x, inst.arrays.y)
    assert scipy.stats.kstest(r, scipy.stats.uniform(0, 25).cdf).statistic < 0.03


def test_instance_invariants_many_seeds():
    for seed in range(1000):
        generate(GenParams(n=5, m=2, seed=seed))  # Instance() validates on construction


def test_validate_single_site_flags_variance():
    rep = validate_assumptions(generate(GenParams(n=1)))
    assert all(not s.variance_defined for s in rep.stats.values())
    assert rep.stats["window_start"].z is not None


def test_validate_zero_quantities():
    inst = make_instance([(1, 0, 0, 10, 0.0)] * 20, capacity=100.0)
    stat = validate_assumptions(inst).stats["quantity"]
    assert stat.mean == 0.0
    assert stat.target_mean == 5.0
    assert abs(stat.z) > 4


def test_default_params_in_analyzed_regime():
    assert GenParams().in_analyzed_regime


@pytest.mark.parametrize(
    "kwargs, name",
    [(dict(n=0), "n"), (dict(m=0), "m"), (dict(capacity=0), "capacity"), (dict(horizon=-1), "horizon"), (dict(seed=-1), "seed")],
)
def test_param_errors(kwargs, name):
    with pytest.raises(ParamError) as err:
        GenParams(**kwargs)
    assert err.value.path == name


@given(st.integers(1, 30), st.integers(0, 2**64 - 1))
def test_generate_valid_for_any_seed(n, seed):
    inst = generate(GenParams(n=n, seed=seed))
    assert inst.n == n
    assert all(s.window_end <= inst.horizon for s in inst.sites)
