"""Monte Carlo experiment harness and runtime probe.

Seeds: trial ``t`` of sweep cell ``c`` generates its instance with
``derive_seed(master_seed, c, t, 0)`` and solves with base seed
``derive_seed(master_seed, c, t, 1)`` (see ``mprp.seeding``). Results are
aggregated in trial-index order, so a report depends only on the plan, never
on how many worker threads ran it.
"""

import csv
import io
import itertools
import json
import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from mprp.generator import GenParams, generate
from mprp.model import LimitError, ModelError, ParamError, profit_upper_bound
from mprp.oracle import OracleLimits, brute_force_opt
from mprp.seeding import check_seed, derive_seed
from mprp.solver import SolverConfig, solve, solve_best_of

SWEEPABLE = ("n", "m", "capacity", "horizon")

CSV_COLUMNS = (
    "n",
    "m",
    "capacity",
    "horizon",
    "trials",
    "restarts",
    "mean_profit",
    "std_profit",
    "ci95",
    "ratio_oracle_mean",
    "ratio_bound_mean",
    "mean_solve_ms",
)


class PlanError(LimitError):
    """A plan asks the oracle for instances beyond its size limit."""


@dataclass(frozen=True)
class ExperimentPlan:
    gen_params: GenParams = GenParams()
    sweep: Dict[str, Tuple] = field(default_factory=dict)
    trials_per_cell: int = 10
    restarts: int = 1
    solver_config: SolverConfig = SolverConfig()
    compare_oracle: bool = False
    master_seed: int = 0
    # Wall-clock is the one non-reproducible column; disable it for byte-identical reports.
    measure_time: bool = True
    oracle_limits: OracleLimits = OracleLimits()

    def __post_init__(self):
        for key in self.sweep:
            if key not in SWEEPABLE:
                raise ParamError(f"unknown sweep parameter {key!r}; expected one of {SWEEPABLE}", f"sweep.{key}")
            if len(self.sweep[key]) == 0:
                raise ParamError("empty sweep range", f"sweep.{key}")
        object.__setattr__(self, "sweep", {k: tuple(v) for k, v in self.sweep.items()})
        for name in ("trials_per_cell", "restarts"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ParamError(f"must be an integer >= 1, got {value!r}", name)
        check_seed(self.master_seed, "master_seed")

    def cells(self) -> List[GenParams]:
        keys = list(self.sweep)
        out = []
        for values in itertools.product(*(self.sweep[k] for k in keys)):
            out.append(self.gen_params.replace(**dict(zip(keys, values))))
        if not out:
            out.append(self.gen_params)
        return out

    def check(self) -> None:
        if self.compare_oracle:
            limit = self.oracle_limits.max_sites_multi_vehicle
            too_big = sorted({c.n for c in self.cells() if c.n > limit})
            if too_big:
                raise PlanError(f"compare_oracle with n={too_big} exceeds oracle limit {limit}")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentPlan":
        data = dict(data)
        try:
            if "gen_params" in data:
                data["gen_params"] = GenParams(**data["gen_params"])
            if "solver_config" in data:
                data["solver_config"] = SolverConfig(**data["solver_config"])
            if "oracle_limits" in data:
                data["oracle_limits"] = OracleLimits(**data["oracle_limits"])
            return cls(**data)
        except TypeError as exc:
            raise ModelError(f"bad plan field: {exc}", "plan") from None

    def to_dict(self) -> dict:
        out = asdict(self)
        out["sweep"] = {k: list(v) for k, v in self.sweep.items()}
        return out


@dataclass(frozen=True)
class TrialResult:
    profit: float
    bound: float
    oracle: Optional[float]
    solve_seconds: float


@dataclass(frozen=True)
class CellRecord:
    n: int
    m: int
    capacity: float
    horizon: float
    trials: int
    restarts: int
    mean_profit: float
    std_profit: float
    ci95: float
    ratio_oracle_mean: Optional[float]
    ratio_bound_mean: Optional[float]
    mean_solve_ms: Optional[float]
    ratios_oracle: Tuple[float, ...] = ()
    ratios_bound: Tuple[float, ...] = ()


@dataclass(frozen=True)
class ExperimentReport:
    plan: ExperimentPlan
    cells: Tuple[CellRecord, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for c in self.cells:
            writer.writerow([_fmt(getattr(c, col)) for col in CSV_COLUMNS])
        return buf.getvalue()

    def to_json(self) -> str:
        cells = [{col: getattr(c, col) for col in CSV_COLUMNS} for c in self.cells]
        return json.dumps({"plan": self.plan.to_dict(), "cells": cells}, indent=2, allow_nan=False)


def _fmt(value) -> str:
    if value is None:
        return ""
    return repr(value) if isinstance(value, float) else str(value)


def _ratio(numerator: float, denominator: float) -> float:
    return numerator / denominator if denominator > 0 else math.nan


def _run_trial(plan: ExperimentPlan, cell_index: int, params: GenParams, trial: int) -> TrialResult:
    instance = generate(params.replace(seed=derive_seed(plan.master_seed, cell_index, trial, 0)))
    seed = derive_seed(plan.master_seed, cell_index, trial, 1)
    start = time.perf_counter()
    if plan.restarts > 1:
        sol = solve_best_of(instance, seed, plan.restarts, plan.solver_config)
    else:
        sol = solve(instance, seed, plan.solver_config)
    elapsed = (time.perf_counter() - start) / plan.restarts
    oracle = None
    if plan.compare_oracle:
        oracle = brute_force_opt(instance, plan.solver_config.profit_config, plan.oracle_limits).profit
    return TrialResult(sol.profit, profit_upper_bound(instance), oracle, elapsed)


def _aggregate(plan: ExperimentPlan, params: GenParams, results: Sequence[TrialResult]) -> CellRecord:
    profits = np.array([r.profit for r in results])
    trials = len(results)
    std = float(profits.std(ddof=1)) if trials > 1 else 0.0
    ratios_bound = tuple(_ratio(r.profit, r.bound) for r in results)
    ratios_oracle: Tuple[float, ...] = ()
    ratio_oracle_mean = None
    if plan.compare_oracle:
        ratios_oracle = tuple(_ratio(r.profit, r.oracle) for r in results)
        finite = [x for x in ratios_oracle if not math.isnan(x)]
        ratio_oracle_mean = math.fsum(finite) / len(finite) if finite else None
    finite_bound = [x for x in ratios_bound if not math.isnan(x)]
    return CellRecord(
        n=params.n,
        m=params.m,
        capacity=float(params.capacity),
        horizon=float(params.horizon),
        trials=trials,
        restarts=plan.restarts,
        mean_profit=math.fsum(profits.tolist()) / trials,
        std_profit=std,
        ci95=1.96 * std / math.sqrt(trials),
        ratio_oracle_mean=ratio_oracle_mean,
        ratio_bound_mean=math.fsum(finite_bound) / len(finite_bound) if finite_bound else None,
        mean_solve_ms=(1e3 * math.fsum(r.solve_seconds for r in results) / trials) if plan.measure_time else None,
        ratios_oracle=ratios_oracle,
        ratios_bound=ratios_bound,
    )


def run_plan(plan: ExperimentPlan, workers: int = 1) -> ExperimentReport:
    """Run every (cell, trial) of the plan, optionally on a thread pool."""
    plan.check()
    cells = plan.cells()
    tasks = [(c, params, t) for c, params in enumerate(cells) for t in range(plan.trials_per_cell)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda task: _run_trial(plan, *task), tasks))
    else:
        results = [_run_trial(plan, *task) for task in tasks]
    per_cell = plan.trials_per_cell
    records = tuple(
        _aggregate(plan, params, results[c * per_cell : (c + 1) * per_cell]) for c, params in enumerate(cells)
    )
    return ExperimentReport(plan, records)


# -- runtime probe -----------------------------------------------------------------


@dataclass(frozen=True)
class TimingRow:
    axis: str
    n: int
    m: int
    median_ms: float
    visits: int


@dataclass(frozen=True)
class RuntimeProbe:
    config: SolverConfig
    rows: Tuple[TimingRow, ...]
    slope_n: Optional[float]
    slope_m: Optional[float]

    def table(self) -> str:
        mode = "frozen" if self.config.frozen_denominator else "fresh"
        lines = [f"denominator={mode}  slope_vs_n={_fmt(self.slope_n)}  slope_vs_m={_fmt(self.slope_m)}"]
        lines.append("axis,n,m,median_ms,visits")
        lines += [f"{r.axis},{r.n},{r.m},{r.median_ms!r},{r.visits}" for r in self.rows]
        return "\n".join(lines)


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log(y) against log(x)."""
    lx, ly = np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float))
    return float(np.polyfit(lx, ly, 1)[0])


def _time_solve(instance, config: SolverConfig, repetitions: int) -> Tuple[float, int]:
    solve(instance, 0, config)  # warm-up, discarded
    times = []
    visits = 0
    for rep in range(repetitions):
        start = time.perf_counter()
        sol = solve(instance, rep, config)
        times.append(time.perf_counter() - start)
        visits = len(sol.visited)
    return 1e3 * statistics.median(times), visits


def runtime_probe(
    n_values: Sequence[int] = (250, 500, 1000, 2000),
    m_values: Sequence[int] = (2, 4, 8, 16),
    config: SolverConfig = SolverConfig(),
    repetitions: int = 5,
    fixed_m: int = 10,
    fixed_n: int = 500,
    quantity_scale: float = 100.0,
    horizon: float = 100.0,
    seed: int = 0,
) -> RuntimeProbe:
    """Median solve time along an n sweep (at ``fixed_m``) and an m sweep (at ``fixed_n``).

    Capacity is ``quantity_scale * n`` so the mean site quantity stays fixed
    as n grows (and T < 4Q/n holds for the default scale).
    """
    for name, values in (("n_values", n_values), ("m_values", m_values)):
        if values and (len(values) < 3 or list(values) != sorted(values)):
            raise ParamError("need at least 3 ascending values", name)
    rows = []
    for n in n_values:
        inst = generate(GenParams(n=n, m=fixed_m, capacity=quantity_scale * n, horizon=horizon, seed=seed))
        ms, visits = _time_solve(inst, config, repetitions)
        rows.append(TimingRow("n", n, fixed_m, ms, visits))
    for m in m_values:
        inst = generate(GenParams(n=fixed_n, m=m, capacity=quantity_scale * fixed_n, horizon=horizon, seed=seed))
        ms, visits = _time_solve(inst, config, repetitions)
        rows.append(TimingRow("m", fixed_n, m, ms, visits))
    n_rows = [r for r in rows if r.axis == "n"]
    m_rows = [r for r in rows if r.axis == "m"]
    slope_n = loglog_slope([r.n for r in n_rows], [r.median_ms for r in n_rows]) if n_rows else None
    slope_m = loglog_slope([r.m for r in m_rows], [r.median_ms for r in m_rows]) if m_rows else None
    return RuntimeProbe(config, tuple(rows), slope_n, slope_m)


def runtime_comparison(**kwargs) -> Dict[str, RuntimeProbe]:
    """The probe in both denominator modes, to surface the accounting gap between them."""
    base = kwargs.pop("config", SolverConfig())
    return {
        "fresh": runtime_probe(config=_with(base, frozen_denominator=False), **kwargs),
        "frozen": runtime_probe(config=_with(base, frozen_denominator=True), **kwargs),
    }


def _with(config: SolverConfig, **changes) -> SolverConfig:
    fields = asdict(config)
    fields.update(changes)
    return SolverConfig(**fields)
