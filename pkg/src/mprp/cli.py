"""Command-line entry point: ``mprp <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data or invariant error, 3 size limit.
Diagnostics go to stderr; data goes to ``--out`` files (written atomically) or stdout.
"""

import argparse
import json
import os
import sys
from typing import List, Optional

from mprp.experiments import ExperimentPlan, run_plan
from mprp.generator import GenParams, generate
from mprp.io import (
    convert_solomon,
    emit_instance,
    emit_solution,
    parse_instance,
    parse_solution,
    read_text,
    write_atomic,
)
from mprp.model import LimitError, ModelError, ProfitConfig, check_solution, evaluate_profit
from mprp.oracle import brute_force_opt, greedy_construct
from mprp.solver import SolverConfig, solve_best_of

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_LIMIT = 0, 1, 2, 3
SEED_ENV = "MPRP_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _emit(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        write_atomic(out, text)


def _default_seed(value: Optional[int]) -> int:
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None


def _load_instance(path: str):
    try:
        text = read_text(path)
    except OSError as exc:
        raise ModelError(f"cannot read instance: {exc.strerror}", path) from None
    try:
        return parse_instance(text)
    except ModelError as exc:
        raise ModelError(str(exc), path) from None


def cmd_gen(args) -> int:
    params = GenParams(n=args.n, m=args.m, capacity=args.capacity, horizon=args.horizon, seed=_default_seed(args.seed))
    _emit(emit_instance(generate(params)), args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    instance = _load_instance(args.instance)
    config = SolverConfig(
        timing_variant=args.timing,
        frozen_denominator=args.frozen_denominator,
        charge_return_leg=not args.no_return_leg,
        max_empty_retries=args.max_empty_retries,
    )
    sol = solve_best_of(instance, _default_seed(args.seed), args.restarts, config)
    _emit(emit_solution(sol), args.out)
    return EXIT_OK


def cmd_exact(args) -> int:
    instance = _load_instance(args.instance)
    config = ProfitConfig(not args.no_return_leg)
    result = brute_force_opt(instance, config)
    data = json.loads(emit_solution(result.to_solution(instance, config)))
    data["vehicle_profits"] = list(result.vehicle_profits)
    _emit(json.dumps(data), args.out)
    return EXIT_OK


def cmd_baseline(args) -> int:
    instance = _load_instance(args.instance)
    sol = greedy_construct(instance, args.rule, SolverConfig(charge_return_leg=not args.no_return_leg))
    _emit(emit_solution(sol), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    instance = _load_instance(args.instance)
    if args.solution is None:
        print(f"instance ok: {instance.n} sites, {instance.fleet_size} vehicles", file=sys.stderr)
        return EXIT_OK
    try:
        solution = parse_solution(read_text(args.solution))
    except OSError as exc:
        raise ModelError(f"cannot read solution: {exc.strerror}", args.solution) from None
    except ModelError as exc:
        raise ModelError(str(exc), args.solution) from None
    report = check_solution(instance, solution)
    ok = report.feasible
    for v in report.violations:
        print(f"violation: route {v.route} position {v.position} {v.kind} site={v.site_id} {v.detail}", file=sys.stderr)
    if ok:
        expected = evaluate_profit(instance, solution.routes, ProfitConfig(not args.no_return_leg))
        if abs(expected - solution.profit) > 1e-6 * max(1.0, abs(expected)):
            print(f"profit mismatch: recorded {solution.profit!r}, recomputed {expected!r}", file=sys.stderr)
            ok = False
    if ok:
        print(f"solution ok: profit {solution.profit!r}", file=sys.stderr)
        return EXIT_OK
    return EXIT_DATA


def cmd_experiment(args) -> int:
    try:
        data = json.loads(read_text(args.plan))
    except OSError as exc:
        raise ModelError(f"cannot read plan: {exc.strerror}", args.plan) from None
    except json.JSONDecodeError as exc:
        raise ModelError(f"malformed JSON: {exc.msg} (line {exc.lineno})", args.plan) from None
    if not isinstance(data, dict):
        raise ModelError("plan must be an object", args.plan)
    if args.no_timing:
        data["measure_time"] = False
    if "master_seed" not in data:
        data["master_seed"] = _default_seed(None)
    report = run_plan(ExperimentPlan.from_dict(data), workers=args.workers)
    if args.out is None and args.out_json is None:
        _emit(report.to_csv(), None)
    if args.out is not None:
        _emit(report.to_csv(), args.out)
    if args.out_json is not None:
        _emit(report.to_json(), args.out_json)
    return EXIT_OK


def cmd_convert(args) -> int:
    try:
        text = read_text(args.solomon)
    except OSError as exc:
        raise ModelError(f"cannot read benchmark file: {exc.strerror}", args.solomon) from None
    horizon = args.horizon
    if horizon != "max_due":
        try:
            horizon = float(horizon)
        except ValueError:
            raise UsageError(f"--horizon must be 'max_due' or a number, got {horizon!r}") from None
    instance, meta = convert_solomon(text, horizon)
    _emit(emit_instance(instance), args.out)
    print(
        f"converted {meta.name}: {instance.n} sites, horizon {meta.horizon!r}, "
        f"{meta.clipped_windows} windows clipped, {meta.ignored_service_times} service times ignored",
        file=sys.stderr,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mprp", description="Maximum-profit pickup routing laboratory.")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--n", type=int, default=50, help="number of sites (default 50)")
    p.add_argument("--m", type=int, default=5, help="fleet size (default 5)")
    p.add_argument("--capacity", type=float, default=5000.0, help="vehicle capacity Q (default 5000)")
    p.add_argument("--horizon", type=float, default=100.0, help="time horizon T (default 100)")
    p.add_argument("--seed", type=int, help=f"64-bit seed (default ${SEED_ENV} or 0)")
    p.add_argument("--out", help="output instance JSON (default stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="run the randomized construction")
    p.add_argument("--instance", required=True, help="instance JSON")
    p.add_argument("--seed", type=int, help=f"64-bit seed (default ${SEED_ENV} or 0)")
    p.add_argument("--restarts", type=int, default=1, help="independent runs, best kept (default 1)")
    p.add_argument("--timing", choices=("repaired", "literal"), default="repaired", help="timing factor variant")
    p.add_argument("--frozen-denominator", action="store_true", help="normalize by the route-start score sum")
    p.add_argument("--no-return-leg", action="store_true", help="do not charge the final leg back to the depot")
    p.add_argument("--max-empty-retries", type=int, help="redraws of an empty candidate set (default n)")
    p.add_argument("--out", help="output solution JSON (default stdout)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("exact", help="exact optimum for small instances")
    p.add_argument("--instance", required=True, help="instance JSON")
    p.add_argument("--no-return-leg", action="store_true", help="do not charge the final leg back to the depot")
    p.add_argument("--out", help="output solution JSON (default stdout)")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("baseline", help="deterministic greedy construction")
    p.add_argument("--rule", choices=("max_score", "nearest_feasible"), default="max_score", help="selection rule")
    p.add_argument("--instance", required=True, help="instance JSON")
    p.add_argument("--no-return-leg", action="store_true", help="do not charge the final leg back to the depot")
    p.add_argument("--out", help="output solution JSON (default stdout)")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("experiment", help="run an experiment plan")
    p.add_argument("--plan", required=True, help="plan JSON (fields of ExperimentPlan)")
    p.add_argument("--out", help="report CSV")
    p.add_argument("--out-json", help="report JSON")
    p.add_argument("--workers", type=int, default=1, help="worker threads (results do not depend on it)")
    p.add_argument("--no-timing", action="store_true", help="leave mean_solve_ms empty for reproducible output")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("validate", help="check an instance, and optionally a solution against it")
    p.add_argument("--instance", required=True, help="instance JSON")
    p.add_argument("--solution", help="solution JSON")
    p.add_argument("--no-return-leg", action="store_true", help="recompute profit without the return leg")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("convert", help="convert a Solomon VRPTW file into instance JSON")
    p.add_argument("--solomon", required=True, help="benchmark text file")
    p.add_argument("--horizon", default="max_due", help="'max_due' (default) or an explicit horizon")
    p.add_argument("--out", help="output instance JSON (default stdout)")
    p.set_defaults(func=cmd_convert)
    return parser


def cli_main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LimitError as exc:
        print(f"limit error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except ModelError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
