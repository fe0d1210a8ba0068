"""Profit ratios: best-of-k against the exact optimum, and the ratio-to-bound trend over n.

Also prints the greedy baselines on the same instances, which separates
properties of the randomized rule from properties of the instance family.
"""

import argparse

import numpy as np

from mprp import GenParams, brute_force_opt, generate, greedy_construct, solve_best_of
from mprp.experiments import ExperimentPlan, run_plan
from mprp.model import profit_upper_bound


def oracle_ratios(instances, restarts):
    out = []
    for i, inst in enumerate(instances):
        opt = brute_force_opt(inst).profit
        out.append(solve_best_of(inst, i, restarts).profit / opt)
    return np.array(out)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--instances", type=int, default=100)
    ap.add_argument("--restarts", type=int, default=500)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--sweep", type=int, nargs="+", default=[20, 40, 80, 160])
    args = ap.parse_args()

    small = [generate(GenParams(n=7, m=2, seed=i)) for i in range(args.instances)]
    r = oracle_ratios(small, args.restarts)
    print(f"best-of-{args.restarts} / OPT on {args.instances} instances (n=7, m=2): "
          f"mean {r.mean():.4f}, min {r.min():.4f}")

    for restarts in (1, 20):
        plan = ExperimentPlan(GenParams(), {"n": tuple(args.sweep)}, trials_per_cell=args.trials,
                              restarts=restarts, measure_time=False)
        cells = run_plan(plan, workers=4).cells
        base = cells[0].ratio_bound_mean
        print(f"\nratio to upper bound, restarts={restarts}")
        for c in cells:
            print(f"  n={c.n:4d}  mean {c.ratio_bound_mean:.4f}  relative {c.ratio_bound_mean / base:.3f}")

    print("\ngreedy baselines, ratio to upper bound")
    for n in args.sweep:
        row = []
        for rule in ("max_score", "nearest_feasible"):
            vals = []
            for t in range(args.trials):
                inst = generate(GenParams(n=n, seed=t))
                vals.append(greedy_construct(inst, rule).profit / profit_upper_bound(inst))
            row.append(f"{rule} {np.mean(vals):.4f}")
        print(f"  n={n:4d}  " + "  ".join(row))


if __name__ == "__main__":
    main()
