import math

import numpy as np
import pytest

from mprp.experiments import (
    ExperimentPlan,
    PlanError,
    loglog_slope,
    run_plan,
    runtime_comparison,
    runtime_probe,
)
from mprp.generator import GenParams, generate
from mprp.model import ParamError
from mprp.seeding import derive_seed
from mprp.solver import SolverConfig, solve


def test_single_trial_reduces_to_one_solve():
    plan = ExperimentPlan(gen_params=GenParams(n=12, m=2), trials_per_cell=1, master_seed=5)
    [cell] = run_plan(plan).cells
    inst = generate(GenParams(n=12, m=2, seed=derive_seed(5, 0, 0, 0)))
    sol = solve(inst, derive_seed(5, 0, 0, 1))
    assert cell.mean_profit == sol.profit
    assert cell.std_profit == 0.0 and cell.ci95 == 0.0 and cell.trials == 1


def test_report_deterministic_across_runs_and_workers():
    plan = ExperimentPlan(
        gen_params=GenParams(n=7, m=2),
        sweep={"n": (5, 7), "m": (1, 2)},
        trials_per_cell=4,
        restarts=3,
        compare_oracle=True,
        master_seed=2024,
        measure_time=False,
    )
    a, b, c = run_plan(plan), run_plan(plan), run_plan(plan, workers=8)
    assert a.to_csv() == b.to_csv() == c.to_csv()
    assert a.to_json() == c.to_json()
    assert len(a.cells) == 4


def test_report_statistics():
    plan = ExperimentPlan(gen_params=GenParams(n=7, m=2), trials_per_cell=6, compare_oracle=True, master_seed=1)
    [cell] = run_plan(plan).cells
    assert cell.trials == 6
    assert cell.ci95 == pytest.approx(1.96 * cell.std_profit / math.sqrt(6))
    assert all(0.0 <= r <= 1.0 + 1e-6 for r in cell.ratios_oracle)
    assert all(r <= 1.0 + 1e-6 for r in cell.ratios_bound)
    assert cell.mean_solve_ms is not None and cell.mean_solve_ms > 0


def test_upper_bound_sanity():
    plan = ExperimentPlan(sweep={"n": (10, 40), "capacity": (200.0, 5000.0)}, trials_per_cell=5, master_seed=3)
    for cell in run_plan(plan).cells:
        assert all(r <= 1.0 + 1e-6 for r in cell.ratios_bound)


def test_plan_validation():
    with pytest.raises(PlanError):
        run_plan(ExperimentPlan(sweep={"n": (5, 20)}, compare_oracle=True))
    with pytest.raises(ParamError):
        ExperimentPlan(sweep={"bogus": (1,)})
    with pytest.raises(ParamError):
        ExperimentPlan(trials_per_cell=0)


def test_plan_dict_round_trip():
    plan = ExperimentPlan(sweep={"n": (20, 40)}, solver_config=SolverConfig(frozen_denominator=True), restarts=3)
    assert ExperimentPlan.from_dict(plan.to_dict()) == plan


def test_csv_layout():
    plan = ExperimentPlan(gen_params=GenParams(n=6, m=1), trials_per_cell=2, measure_time=False)
    lines = run_plan(plan).to_csv().splitlines()
    assert lines[0].split(",")[-1] == "mean_solve_ms"
    row = lines[1].split(",")
    assert row[:6] == ["6", "1", "5000.0", "100.0", "2", "1"]
    assert row[9] == "" and row[11] == ""


def test_loglog_slope_exact():
    xs = np.array([1.0, 2.0, 4.0, 8.0])
    assert loglog_slope(xs, 3 * xs**1.5) == pytest.approx(1.5)


def test_runtime_probe_shape():
    probe = runtime_probe(n_values=(20, 40, 80), m_values=(1, 2, 4), repetitions=2, fixed_n=40)
    assert [r.axis for r in probe.rows] == ["n"] * 3 + ["m"] * 3
    assert probe.slope_n is not None and probe.slope_m is not None
    assert "slope_vs_n" in probe.table()
    with pytest.raises(ParamError):
        runtime_probe(n_values=(40, 20, 10), m_values=())


def test_runtime_comparison_both_modes():
    probes = runtime_comparison(n_values=(20, 40, 80), m_values=(), repetitions=1)
    assert set(probes) == {"fresh", "frozen"}
    assert probes["frozen"].config.frozen_denominator and not probes["fresh"].config.frozen_denominator
