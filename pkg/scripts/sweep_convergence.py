"""Convergence rates across seeded random schedules.

Runs N scenarios per (ADT, replica count) cell and tabulates how many
converged after the final gossip rounds. Lattice ADTs should sit at
100%; sum-counter should sit at 0% for two replicas because the ring
rounds double-count every write.
"""

import argparse

from calmcheck.simulator import random_scenario, run


def sweep_cell(adt, replicas, count, steps, base_seed):
    converged = 0
    first_divergence = None
    for k in range(count):
        scenario = random_scenario(adt, replicas=replicas, steps=steps,
                                   seed=base_seed + k)
        report = run(scenario)
        if report.converged:
            converged += 1
        elif first_divergence is None:
            first_divergence = scenario.seed
    return converged, first_divergence


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--adts", default="gset,max-register,sum-counter")
    parser.add_argument("--replicas", default="2,3,4")
    parser.add_argument("--count", type=int, default=500)
    parser.add_argument("--steps", type=int, default=8)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    adts = [a.strip() for a in args.adts.split(",") if a.strip()]
    replica_counts = [int(r) for r in args.replicas.split(",") if r]

    print(f"{'adt':<14} {'replicas':>8} {'converged':>10} {'rate':>7}  first divergence")
    for adt in adts:
        for replicas in replica_counts:
            converged, first = sweep_cell(
                adt, replicas, args.count, args.steps, args.seed,
            )
            rate = converged / args.count
            first_text = "-" if first is None else f"seed {first}"
            print(f"{adt:<14} {replicas:>8} {converged:>7}/{args.count:<3}"
                  f" {rate:>6.1%}  {first_text}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
