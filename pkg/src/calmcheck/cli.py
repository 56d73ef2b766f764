"""Command line front end.

Verdicts are single JSON lines on stdout (stable key order, no spaces)
so reruns are byte-identical; --summary adds a human line on stderr.

Exit codes: 0 the checked property holds (or every sweep scenario
converged), 1 it fails, 2 bad usage or invalid input.
"""

import argparse
import json
import sys

from . import __version__
from .adt import AdtError
from .catalog import ADT_NAMES, PROBLEM_NAMES, build_adt, build_problem
from .clauses import BudgetError, ClauseParseError
from .coordination import Bounds, calm_cross_check, check_coordination_free
from .problems import canonical_implementation, check_monotone
from .sec import check_sec_definition
from .simulator import (
    ScenarioError,
    load_scenario,
    observe_partition_consistency,
    random_scenario,
    render_dot,
    run,
)


def _emit(payload):
    sys.stdout.write(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n")


def _note(args, text):
    if args.summary:
        print(text, file=sys.stderr)


def _split_symbols(text):
    if not text:
        return None
    return [part.strip() for part in text.split(",") if part.strip()]


def _add_adt_options(parser, required):
    parser.add_argument(
        "--adt",
        required=required,
        default=None if required else "gset",
        choices=ADT_NAMES,
        help="registered ADT name",
    )
    parser.add_argument("--alphabet-size", type=int, default=None,
                        help="alphabet size for gset/sum-counter/max-register")
    parser.add_argument("--nodes", type=int, default=None,
                        help="node count for deadlock/gc (default 2)")
    parser.add_argument("--symbols", default=None,
                        help="comma separated symbol list (gset only)")


def _add_problem_options(parser):
    parser.add_argument("--problem", required=True, choices=PROBLEM_NAMES,
                        help="registered problem name")
    parser.add_argument("--nodes", type=int, default=None,
                        help="node count for graph problems (default 2)")
    parser.add_argument("--alphabet-size", type=int, default=None,
                        help="alphabet size for the constant problem")


def _adt_from(args):
    return build_adt(
        args.adt,
        alphabet_size=args.alphabet_size,
        nodes=args.nodes,
        symbols=_split_symbols(args.symbols),
    )


def _problem_from(args):
    return build_problem(args.problem, nodes=args.nodes,
                         alphabet_size=args.alphabet_size)


# ---- subcommand handlers -----------------------------------------------------


def _cmd_check_sec(args):
    adt = _adt_from(args)
    verdict = check_sec_definition(
        adt,
        max_size=args.max_size,
        samples=args.samples,
        seed=args.seed,
        budget=args.budget,
    )
    _emit(verdict.as_json())
    if verdict.sec_up_to_bound:
        _note(args, f"{adt.name}: SEC holds for clauses up to size {args.max_size}")
    else:
        _note(args, f"{adt.name}: SEC FAILS ({verdict.outcome})")
    return 0 if verdict.sec_up_to_bound else 1


def _cmd_check_monotone(args):
    problem = _problem_from(args)
    verdict = check_monotone(problem, max_space=args.max_space)
    _emit(verdict.as_json())
    if verdict.monotone_on_space:
        _note(args, f"{problem.name}: monotone on {verdict.space_size} legal inputs")
    else:
        w = verdict.witness
        _note(args, f"{problem.name}: NOT monotone, "
                    f"P drops from {w.v1_text} to {w.v2_text} as the input grows")
    return 0 if verdict.monotone_on_space else 1


def _bounds_from(args):
    return Bounds(
        max_clause_size=args.max_size,
        max_space=args.max_space,
        clause_budget=args.budget,
    )


def _cmd_check_cf(args):
    problem = _problem_from(args)
    impl = canonical_implementation(problem)
    verdict = check_coordination_free(impl, _bounds_from(args),
                                      include_timing=args.timing)
    _emit(verdict.as_json())
    _note(args, f"{problem.name}: valid={verdict.valid} "
                f"confluent={verdict.confluent} "
                f"partition_consistent={verdict.partition_consistent}")
    return 0 if (verdict.valid and verdict.coordination_free) else 1


def _cmd_calm(args):
    problem = _problem_from(args)
    report = calm_cross_check(problem, _bounds_from(args),
                              include_timing=args.timing)
    _emit(report.as_json())
    verb = "agree" if report.agree else "DISAGREE"
    _note(args, f"{problem.name}: monotone={report.monotone} "
                f"coordination_free={report.coordination_free} ({verb})")
    return 0 if report.agree else 1


def _cmd_simulate(args):
    scenario = load_scenario(args.scenario)
    report = run(scenario)
    _emit(report.as_json())
    code = 0 if report.converged else 1
    if args.problem:
        problem = build_problem(args.problem, nodes=args.nodes,
                                alphabet_size=args.alphabet_size)
        observed = observe_partition_consistency(report, problem)
        _emit(observed.as_json())
        if not observed.holds:
            code = 1
    state = "converged" if report.converged else "DIVERGED"
    _note(args, f"{scenario.adt} x{scenario.replicas}: {state}, "
                f"{report.applied_events} events, {len(report.dropped)} dropped")
    return code


def _cmd_sweep(args):
    try:
        replica_choices = [int(part) for part in args.replicas.split(",") if part]
    except ValueError:
        raise ValueError(f"--replicas must be comma separated integers, "
                         f"got {args.replicas!r}") from None
    if not replica_choices or any(r < 1 for r in replica_choices):
        raise ValueError("--replicas needs positive replica counts")
    params = {}
    if args.alphabet_size is not None:
        params["alphabet_size"] = args.alphabet_size
    if args.nodes is not None:
        params["nodes"] = args.nodes
    symbols = _split_symbols(args.symbols)
    if symbols:
        params["symbols"] = symbols

    converged = 0
    first_divergence = None
    for k in range(args.count):
        replicas = replica_choices[k % len(replica_choices)]
        scenario = random_scenario(
            args.adt, params, replicas=replicas, steps=args.steps,
            seed=args.seed + k,
        )
        report = run(scenario)
        if report.converged:
            converged += 1
        elif first_divergence is None:
            first_divergence = scenario.seed
        _emit({
            "seed": scenario.seed,
            "replicas": replicas,
            "converged": report.converged,
            "events": len(scenario.events),
            "dropped": len(report.dropped),
            "outputs": list(report.final_output_texts),
        })
    _emit({
        "summary": True,
        "adt": args.adt,
        "count": args.count,
        "converged": converged,
        "diverged": args.count - converged,
        "first_divergence_seed": first_divergence,
    })
    _note(args, f"{args.adt}: {converged}/{args.count} scenarios converged")
    return 0 if converged == args.count else 1


def _cmd_render_trace(args):
    scenario = load_scenario(args.scenario)
    report = run(scenario)
    dot = render_dot(report)
    if args.out == "-":
        sys.stdout.write(dot)
    else:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(dot)
        _note(args, f"wrote {args.out}")
    return 0


# ---- parser ------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="calmcheck",
        description="verify replicated ADTs and query problems at desk scale",
    )
    parser.add_argument("--version", action="version",
                        version=f"calmcheck {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-sec",
                       help="strong eventual consistency: the four laws plus "
                            "the definition, exhaustively up to a clause size")
    _add_adt_options(p, required=True)
    p.add_argument("--max-size", type=int, default=4)
    p.add_argument("--samples", type=int, default=0,
                   help="extra randomized law instances beyond the bound")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=None,
                   help="cap on enumerated clauses (env CALMCHECK_BUDGET)")
    p.add_argument("--summary", action="store_true")
    p.set_defaults(handler=_cmd_check_sec)

    p = sub.add_parser("check-monotone",
                       help="is the problem monotone on its legal inputs")
    _add_problem_options(p)
    p.add_argument("--max-space", type=int, default=4096)
    p.add_argument("--summary", action="store_true")
    p.set_defaults(handler=_cmd_check_monotone)

    p = sub.add_parser("check-cf",
                       help="confluence and partition consistency of the "
                            "problem's canonical replicated implementation")
    _add_problem_options(p)
    p.add_argument("--max-size", type=int, default=4)
    p.add_argument("--max-space", type=int, default=4096)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--timing", action="store_true",
                   help="include wall clock seconds in the verdict")
    p.add_argument("--summary", action="store_true")
    p.set_defaults(handler=_cmd_check_cf)

    p = sub.add_parser("calm",
                       help="cross-check monotonicity against coordination "
                            "freedom; both directions must agree")
    _add_problem_options(p)
    p.add_argument("--max-size", type=int, default=4)
    p.add_argument("--max-space", type=int, default=4096)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--timing", action="store_true")
    p.add_argument("--summary", action="store_true")
    p.set_defaults(handler=_cmd_calm)

    p = sub.add_parser("simulate", help="replay a scenario file")
    p.add_argument("--scenario", required=True, help="scenario JSON path")
    p.add_argument("--problem", default=None, choices=PROBLEM_NAMES,
                   help="also check mid-run query outputs against the final "
                        "outputs under this problem's consistency order")
    p.add_argument("--nodes", type=int, default=None)
    p.add_argument("--alphabet-size", type=int, default=None)
    p.add_argument("--summary", action="store_true")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("sweep",
                       help="run seeded random scenarios and report "
                            "convergence, one JSON line each")
    _add_adt_options(p, required=False)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--replicas", default="2,3,4",
                   help="comma separated replica counts, cycled per scenario")
    p.add_argument("--steps", type=int, default=8)
    p.add_argument("--seed", type=int, default=0, help="base seed")
    p.add_argument("--summary", action="store_true")
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("render-trace",
                       help="replay a scenario and emit a Graphviz timeline")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", default="-", help="output path, - for stdout")
    p.add_argument("--summary", action="store_true")
    p.set_defaults(handler=_cmd_render_trace)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ScenarioError, ClauseParseError, BudgetError, AdtError) as exc:
        print(f"calmcheck: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"calmcheck: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"calmcheck: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
