"""Solve many seeded preset instances and count infeasible solutions."""

import argparse
import time

from mprp import GenParams, SolverConfig, check_feasible, generate, solve


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--runs", type=int, default=10_000)
    ap.add_argument("--timing", choices=("repaired", "literal"), default="repaired")
    ap.add_argument("--frozen-denominator", action="store_true")
    args = ap.parse_args()

    config = SolverConfig(timing_variant=args.timing, frozen_denominator=args.frozen_denominator)
    start = time.perf_counter()
    bad = visits = 0
    for seed in range(args.runs):
        inst = generate(GenParams(seed=seed))
        sol = solve(inst, seed, config)
        visits += len(sol.visited)
        report = check_feasible(inst, sol.routes)
        if not report.feasible:
            bad += 1
            print(f"seed {seed}: {report.violations[0]}")
    elapsed = time.perf_counter() - start
    print(f"{args.runs} runs, {bad} infeasible, mean visits {visits / args.runs:.2f}, {elapsed:.1f}s")


if __name__ == "__main__":
    main()
