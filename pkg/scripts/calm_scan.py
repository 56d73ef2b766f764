"""Cross-check monotonicity against coordination freedom per problem.

Scans every registered problem at increasing node counts (alphabet
sizes for constant) and prints whether the two verdicts agree, plus
wall clock time per cell. Clause and input-space sizes grow as
2^(n^2), so the scan stops at whatever still fits the given bounds.
"""

import argparse

from calmcheck.catalog import PROBLEM_NAMES, build_problem
from calmcheck.clauses import BudgetError
from calmcheck.coordination import Bounds, calm_cross_check


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scales", default="2,3",
                        help="node counts / alphabet sizes to scan")
    parser.add_argument("--max-size", type=int, default=5)
    parser.add_argument("--max-space", type=int, default=512)
    parser.add_argument("--budget", type=int, default=None)
    args = parser.parse_args()

    bounds = Bounds(max_clause_size=args.max_size, max_space=args.max_space,
                    clause_budget=args.budget)
    scales = [int(s) for s in args.scales.split(",") if s]

    header = (f"{'problem':<14} {'scale':>5} {'monotone':>9} "
              f"{'coord-free':>11} {'agree':>6} {'seconds':>8}")
    print(header)
    disagreements = 0
    for name in PROBLEM_NAMES:
        for scale in scales:
            problem = build_problem(name, nodes=scale, alphabet_size=scale)
            try:
                report = calm_cross_check(problem, bounds, include_timing=True)
            except BudgetError as exc:
                print(f"{name:<14} {scale:>5} skipped: {exc}")
                continue
            if not report.agree:
                disagreements += 1
            print(f"{name:<14} {scale:>5} {str(report.monotone):>9} "
                  f"{str(report.coordination_free):>11} "
                  f"{str(report.agree):>6} "
                  f"{report.cf_verdict.timing_seconds:>8.2f}")
    if disagreements:
        print(f"\n{disagreements} cell(s) DISAGREE; inspect the bounds")
    return 1 if disagreements else 0


if __name__ == "__main__":
    raise SystemExit(main())
