"""Problems as functions from total inputs to an output poset.

A problem maps legal total inputs (subsets of a finite alphabet,
filtered by a legality predicate) into outputs carrying a consistency
order: v1 <= v2 means v2 does not contradict v1, only refines it.
Checkers here verify that the order is a partial order on reachable
outputs and whether the problem is monotone; canonical_implementation
builds the generic coordination-free implementation that exists exactly
for monotone problems (state = input set, write = insert, merge =
union, query = the problem function).
"""

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Optional

from .adt import AbstractDataType
from .clauses import BudgetError, symbol_key


def render_symbol_set(symbols):
    return "{" + ", ".join(sorted(symbols, key=symbol_key)) + "}"


@dataclass(frozen=True)
class TotalInputSpace:
    """The legal total inputs: subsets of the alphabet passing `legal`."""

    alphabet: tuple
    legal: Callable[[frozenset], bool]
    description: str = "any subset of the alphabet"


def full_space(alphabet):
    return TotalInputSpace(
        alphabet=tuple(sorted(alphabet, key=symbol_key)), legal=lambda x: True
    )


@dataclass(frozen=True)
class Problem:
    """(input space, total-input function, consistency order on outputs).

    apply must be total on every subset of the alphabet, legal or not:
    partition checkers evaluate queries on intermediate states whose
    input sets may fall outside the legal space.
    """

    name: str
    space: TotalInputSpace
    apply: Callable[[frozenset], object]
    order_leq: Callable[[object, object], bool]
    render_output: Callable[[object], str] = repr


@dataclass(frozen=True)
class LegalityVerdict:
    legal: bool
    reason: str

    def as_json(self):
        return {"legal": self.legal, "reason": self.reason}


def query_domain_note(problem, x):
    """Whether x is a legal total input for the problem, and if not why."""
    x = frozenset(x)
    alphabet = set(problem.space.alphabet)
    stray = sorted(x - alphabet, key=symbol_key)
    if stray:
        return LegalityVerdict(False, f"symbols outside the alphabet: {stray}")
    if not problem.space.legal(x):
        return LegalityVerdict(False, f"rejected by the input space: {problem.space.description}")
    return LegalityVerdict(True, "")


def enumerate_space(space, max_space=4096):
    """All legal total inputs, ordered by size then sorted members."""
    total = 1 << len(space.alphabet)
    if total > max_space:
        raise BudgetError("total input space enumeration", total, max_space)
    alphabet = sorted(space.alphabet, key=symbol_key)
    out = []
    for k in range(len(alphabet) + 1):
        for combo in combinations(alphabet, k):
            x = frozenset(combo)
            if space.legal(x):
                out.append(x)
    return out


@dataclass(frozen=True)
class OrderVerdict:
    holds: bool
    violated: Optional[str]  # reflexivity | antisymmetry | transitivity
    witness: tuple  # rendered outputs involved

    def as_json(self):
        return {
            "order_is_partial_order": self.holds,
            "violated": self.violated,
            "witness": list(self.witness),
        }


def check_consistency_order(problem, max_space=4096):
    """Partial-order laws of order_leq on the reachable outputs."""
    outputs = []
    seen = set()
    for x in enumerate_space(problem.space, max_space):
        value = problem.apply(x)
        key = problem.render_output(value)
        if key not in seen:
            seen.add(key)
            outputs.append(value)

    leq = problem.order_leq
    rendered = [problem.render_output(v) for v in outputs]
    n = len(outputs)
    for i in range(n):
        if not leq(outputs[i], outputs[i]):
            return OrderVerdict(False, "reflexivity", (rendered[i],))

    # relation as bitmask rows: below[i] has bit j set iff v_i <= v_j
    below = []
    for i in range(n):
        row = 0
        for j in range(n):
            if leq(outputs[i], outputs[j]):
                row |= 1 << j
        below.append(row)

    for i in range(n):
        for j in range(n):
            if i != j and (below[i] >> j) & 1 and (below[j] >> i) & 1:
                return OrderVerdict(False, "antisymmetry", (rendered[i], rendered[j]))

    for i in range(n):
        row = below[i]
        rest = row
        while rest:
            j = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            # everything below-reachable from j must be reachable from i
            if below[j] & ~row:
                k = ((below[j] & ~row) & -(below[j] & ~row)).bit_length() - 1
                return OrderVerdict(
                    False, "transitivity", (rendered[i], rendered[j], rendered[k])
                )
    return OrderVerdict(True, None, ())


@dataclass(frozen=True)
class MonotoneWitness:
    x1: frozenset
    x2: frozenset
    v1: object
    v2: object
    v1_text: str
    v2_text: str

    def as_json(self):
        return {
            "x1": sorted(self.x1, key=symbol_key),
            "x2": sorted(self.x2, key=symbol_key),
            "v1": self.v1_text,
            "v2": self.v2_text,
        }


@dataclass(frozen=True)
class MonotonicityVerdict:
    problem: str
    monotone_on_space: bool
    witness: Optional[MonotoneWitness]
    space_size: int
    pairs_checked: int

    def as_json(self):
        return {
            "problem": self.problem,
            "monotone_on_space": self.monotone_on_space,
            "witness": self.witness.as_json() if self.witness else None,
            "space_size": self.space_size,
            "pairs_checked": self.pairs_checked,
        }


def check_monotone(problem, max_space=4096):
    """x1 subset of x2 must imply P(x1) <= P(x2), over all legal pairs.

    The witness, if any, is minimal by |x2| then |x1| (ties broken by
    sorted member order), which the nested ascending scan guarantees.
    """
    sets = enumerate_space(problem.space, max_space)
    values = {x: problem.apply(x) for x in sets}
    leq = problem.order_leq
    pairs = 0
    for x2 in sets:
        v2 = values[x2]
        for x1 in sets:
            if not x1 <= x2:
                continue
            pairs += 1
            if not leq(values[x1], v2):
                witness = MonotoneWitness(
                    x1,
                    x2,
                    values[x1],
                    v2,
                    problem.render_output(values[x1]),
                    problem.render_output(v2),
                )
                return MonotonicityVerdict(problem.name, False, witness, len(sets), pairs)
    return MonotonicityVerdict(problem.name, True, None, len(sets), pairs)


def canonical_implementation(problem):
    """The generic construction: replicas accumulate the input set itself.

    state = set of symbols seen, write = insert, merge = union, query =
    the problem function, and the coordination function admits exactly
    the clauses whose input set equals the total input. Coordination
    free iff the problem is monotone.
    """
    # imported here: coordination pulls checkers from this module at top level
    from .coordination import CoordinationFunction, Implementation

    alphabet = frozenset(problem.space.alphabet)
    ro = AbstractDataType(
        name=f"{problem.name}-input-set",
        alphabet=alphabet,
        initial=frozenset(),
        write=lambda s, i: s | {i},
        query=problem.apply,
        merge=lambda a, b: a | b,
        render_state=render_symbol_set,
        render_output=problem.render_output,
    )
    return Implementation(
        cf=CoordinationFunction.exact_input_sets(), ro=ro, problem=problem
    )
