"""Coordination functions, implementations, and the CALM cross-check.

An implementation is a coordination function (a membership predicate
over (total input, clause) pairs) plus a replicated object claiming to
solve a problem. The checkers here are bounded-exhaustive:

 - validity: every admitted clause answers the problem, Q(E(c)) = P(x)
 - confluence: every clause whose input set equals x is admitted
 - consistency under partition: query outputs of a clause's subterms
   never contradict the full clause's output
 - coordination-free = confluent and consistent under partition
 - calm_cross_check: monotonicity and coordination-freedom of the
   canonical implementation must agree, in both directions

Coordination functions are predicates, never materialized sets (the
admitted set is infinite for confluent implementations), so everything
is reported as "holds up to the bound".
"""

import time
from dataclasses import dataclass
from typing import Callable, Optional

from .adt import memoized_evaluator
from .clauses import (
    INITIAL,
    Write,
    clause_sort_key,
    enumerate_clauses,
    partitions,
    render,
    symbol_key,
)
from .problems import (
    Problem,
    canonical_implementation,
    check_monotone,
    enumerate_space,
)


@dataclass(frozen=True)
class CoordinationFunction:
    """Membership test for c in CF(x).

    input_exact=True declares that allows(x, c) is equivalent to
    input_set(c) == x, letting checkers index clauses by input set
    instead of scanning the full (x, clause) product. The predicate is
    still consulted where the definition requires it; a meta-test pins
    the hint to the predicate.
    """

    allows: Callable[[frozenset, object], bool]
    name: str = "cf"
    input_exact: bool = False

    @staticmethod
    def exact_input_sets():
        return CoordinationFunction(
            allows=lambda x, c: c.inputs == x,
            name="complete-input",
            input_exact=True,
        )


@dataclass(frozen=True)
class Implementation:
    cf: CoordinationFunction
    ro: object  # replicated AbstractDataType
    problem: Problem


@dataclass(frozen=True)
class Bounds:
    max_clause_size: int = 4
    max_space: int = 4096
    clause_budget: Optional[int] = None

    def as_json(self):
        return {
            "max_clause_size": self.max_clause_size,
            "max_space": self.max_space,
            "clause_budget": self.clause_budget,
        }


@dataclass(frozen=True)
class PropertyVerdict:
    """One checked property with an optional minimal witness."""

    holds: bool
    witness: Optional[dict]  # already rendered, JSON ready

    def as_json(self):
        return {"holds": self.holds, "witness": self.witness}


@dataclass(frozen=True)
class CfVerdict:
    problem: str
    adt: str
    cf: str
    valid: bool
    confluent: bool
    partition_consistent: bool
    coordination_free: bool
    validity: PropertyVerdict
    confluence: PropertyVerdict
    partition: PropertyVerdict
    bounds: Bounds
    timing_seconds: Optional[float] = None

    def as_json(self):
        out = {
            "problem": self.problem,
            "adt": self.adt,
            "cf": self.cf,
            "valid": self.valid,
            "confluent": self.confluent,
            "partition_consistent": self.partition_consistent,
            "coordination_free": self.coordination_free,
            "validity_witness": self.validity.witness,
            "confluence_witness": self.confluence.witness,
            "partition_witness": self.partition.witness,
            "bounds": self.bounds.as_json(),
        }
        if self.timing_seconds is not None:
            out["timing_seconds"] = self.timing_seconds
        return out


def _universe(impl, bounds):
    space = impl.problem.space
    clause_set = enumerate_clauses(
        space.alphabet, bounds.max_clause_size, bounds.clause_budget
    )
    sets = enumerate_space(space, bounds.max_space)
    by_inputs = {}
    for c in clause_set:
        by_inputs.setdefault(c.inputs, []).append(c)
    return clause_set, sets, by_inputs


def _admitted(impl, x, clause_set, by_inputs):
    """Clauses admitted for x, in enumeration order."""
    if impl.cf.input_exact:
        return by_inputs.get(x, ())
    return [c for c in clause_set if impl.cf.allows(x, c)]


def check_validity(impl, bounds=Bounds()):
    """P(x) = Q(E(c)) for every legal x and every admitted clause c."""
    clause_set, sets, by_inputs = _universe(impl, bounds)
    ev = memoized_evaluator(impl.ro)
    render_out = impl.problem.render_output
    for x in sets:
        want = impl.problem.apply(x)
        for c in _admitted(impl, x, clause_set, by_inputs):
            got = ev.query(c)
            if got != want:
                return PropertyVerdict(
                    False,
                    {
                        "x": sorted(x, key=symbol_key),
                        "clause": render(c),
                        "query_output": render_out(got),
                        "problem_output": render_out(want),
                    },
                )
    return PropertyVerdict(True, None)


def check_confluence(impl, bounds=Bounds()):
    """Every clause with input_set(c) = x (x legal) must be admitted."""
    clause_set, sets, by_inputs = _universe(impl, bounds)
    for x in sets:
        for c in by_inputs.get(x, ()):
            if not impl.cf.allows(x, c):
                return PropertyVerdict(
                    False, {"x": sorted(x, key=symbol_key), "clause": render(c)}
                )
    return PropertyVerdict(True, None)


def check_partition_consistency(impl, bounds=Bounds()):
    """Q(E(c0)) <= Q(E(c)) for every subterm c0 of every admitted clause.

    Witness is minimal by (|x|, clause size, subterm size).
    """
    clause_set, sets, by_inputs = _universe(impl, bounds)
    ev = memoized_evaluator(impl.ro)
    leq = impl.problem.order_leq
    render_out = impl.problem.render_output
    out_cache = {}

    def query(c):
        if c not in out_cache:
            out_cache[c] = ev.query(c)
        return out_cache[c]

    for x in sets:
        for c in _admitted(impl, x, clause_set, by_inputs):
            full = query(c)
            for c0 in sorted(partitions(c), key=clause_sort_key):
                sub = query(c0)
                if not leq(sub, full):
                    return PropertyVerdict(
                        False,
                        {
                            "x": sorted(x, key=symbol_key),
                            "clause": render(c),
                            "subterm": render(c0),
                            "subterm_output": render_out(sub),
                            "clause_output": render_out(full),
                        },
                    )
    return PropertyVerdict(True, None)


def check_coordination_free(impl, bounds=Bounds(), include_timing=False):
    """Validity, confluence, and partition consistency in one verdict."""
    started = time.monotonic()
    validity = check_validity(impl, bounds)
    confluence = check_confluence(impl, bounds)
    partition = check_partition_consistency(impl, bounds)
    elapsed = time.monotonic() - started
    return CfVerdict(
        problem=impl.problem.name,
        adt=impl.ro.name,
        cf=impl.cf.name,
        valid=validity.holds,
        confluent=confluence.holds,
        partition_consistent=partition.holds,
        coordination_free=confluence.holds and partition.holds,
        validity=validity,
        confluence=confluence,
        partition=partition,
        bounds=bounds,
        timing_seconds=round(elapsed, 6) if include_timing else None,
    )


@dataclass(frozen=True)
class CalmReport:
    problem: str
    monotone: bool
    coordination_free: bool
    agree: bool
    monotonicity: object  # MonotonicityVerdict
    cf_verdict: CfVerdict
    converse_checked: bool
    converse_monotone: Optional[bool]
    converse_witness: Optional[dict]

    def as_json(self):
        return {
            "problem": self.problem,
            "monotone": self.monotone,
            "coordination_free": self.coordination_free,
            "agree": self.agree,
            "monotonicity": self.monotonicity.as_json(),
            "implementation": self.cf_verdict.as_json(),
            "converse_checked": self.converse_checked,
            "converse_monotone": self.converse_monotone,
            "converse_witness": self.converse_witness,
        }


def _local_chain(symbols):
    acc = INITIAL
    for sym in symbols:
        acc = Write(acc, sym)
    return acc


def calm_cross_check(problem, bounds=Bounds(), include_timing=False):
    """Both theorem directions at the bound.

    Forward: monotone problems get a coordination-free canonical
    implementation. Converse: when the implementation is coordination
    free, monotonicity is re-derived through local clause chains
    c1 = s0 W i1 .. W in and c2 = c1 W i(n+1) .. W im, transporting
    each legal pair x1 subset x2 into clause evaluations.
    """
    mono = check_monotone(problem, bounds.max_space)
    impl = canonical_implementation(problem)
    cf_verdict = check_coordination_free(impl, bounds, include_timing)

    converse_checked = cf_verdict.coordination_free
    converse_monotone = None
    converse_witness = None
    if converse_checked:
        ev = memoized_evaluator(impl.ro)
        leq = problem.order_leq
        render_out = problem.render_output
        sets = enumerate_space(problem.space, bounds.max_space)
        chains = {
            x: _local_chain(sorted(x, key=symbol_key)) for x in sets
        }
        converse_monotone = True
        for x2 in sets:
            for x1 in sets:
                if not x1 <= x2:
                    continue
                c1 = chains[x1]
                c2 = c1
                for sym in sorted(x2 - x1, key=symbol_key):
                    c2 = Write(c2, sym)
                v1, v2 = ev.query(c1), ev.query(c2)
                if not leq(v1, v2):
                    converse_monotone = False
                    converse_witness = {
                        "c1": render(c1),
                        "c2": render(c2),
                        "v1": render_out(v1),
                        "v2": render_out(v2),
                    }
                    break
            if converse_witness:
                break

    agree = mono.monotone_on_space == cf_verdict.coordination_free
    return CalmReport(
        problem=problem.name,
        monotone=mono.monotone_on_space,
        coordination_free=cf_verdict.coordination_free,
        agree=agree,
        monotonicity=mono,
        cf_verdict=cf_verdict,
        converse_checked=converse_checked,
        converse_monotone=converse_monotone,
        converse_witness=converse_witness,
    )
