"""Time the solver over n and m in both denominator modes and fit log-log slopes."""

import argparse

from mprp.experiments import runtime_comparison


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[250, 500, 1000, 2000])
    ap.add_argument("--m", type=int, nargs="+", default=[2, 4, 8, 16])
    ap.add_argument("--repetitions", type=int, default=5)
    args = ap.parse_args()

    for mode, probe in runtime_comparison(n_values=tuple(args.n), m_values=tuple(args.m),
                                          repetitions=args.repetitions).items():
        print(probe.table())
        print()


if __name__ == "__main__":
    main()
