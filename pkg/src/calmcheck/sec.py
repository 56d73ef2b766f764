"""Strong eventual consistency checking for replicated ADTs.

Two routes, both bounded by (alphabet, max clause size):

 - check_laws: the four conditions that together are necessary and
   sufficient for SEC
     1. write-as-merge   E(c W i) = E(c M (s0 W i))
     2. associativity    E((c M c1) M c2) = E(c M (c1 M c2))
     3. commutativity    E(c1 M c2) = E(c2 M c1)
     4. idempotence      E(c1 M c1) = E(c1)
 - check_sec_definition: the definition itself, equal input sets must
   yield equal states, checked by grouping every enumerated clause by
   its input set.

Failures come with minimal re-checkable witnesses. A seeded randomized
supplement can sample clauses beyond the exhaustive bound.
"""

from dataclasses import dataclass
from itertools import product
from typing import Optional

from .adt import MergeUnavailableError, UnknownSymbolError, memoized_evaluator
from .clauses import (
    INITIAL,
    Merge,
    Write,
    enumerate_clauses,
    random_clause,
    render,
    symbol_key,
)
from .rng import SplitMix64

LAWS = ("write-as-merge", "associativity", "commutativity", "idempotence")

_REPEAT_NOTE = (
    "exhaustive over clauses of tree size <= {max_size}; clauses repeating "
    "inputs beyond that size are covered only by the randomized samples"
)


@dataclass(frozen=True)
class LawWitness:
    """A failing instance: evaluating lhs and rhs reproduces the inequality."""

    parts: tuple  # the generating clauses
    lhs: object
    rhs: object
    lhs_state: str
    rhs_state: str

    def as_json(self):
        return {
            "parts": [render(c) for c in self.parts],
            "lhs": render(self.lhs),
            "rhs": render(self.rhs),
            "lhs_state": self.lhs_state,
            "rhs_state": self.rhs_state,
        }


@dataclass(frozen=True)
class LawReport:
    law: str
    holds: bool
    witness: Optional[LawWitness]
    alphabet: tuple
    max_size: int
    samples: int = 0
    seed: Optional[int] = None

    def as_json(self):
        return {
            "law": self.law,
            "holds": self.holds,
            "witness": self.witness.as_json() if self.witness else None,
            "alphabet": list(self.alphabet),
            "max_size": self.max_size,
            "samples": self.samples,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class SecVerdict:
    sec_up_to_bound: bool
    failing_pair: Optional[tuple]
    failing_states: Optional[tuple]
    law_reports: tuple
    outcome: str  # sec-holds | sec-fails-law-witness | sec-fails-no-law-witness
    alphabet: tuple
    max_size: int
    note: str

    def as_json(self):
        return {
            "sec_up_to_bound": self.sec_up_to_bound,
            "outcome": self.outcome,
            "failing_pair": [render(c) for c in self.failing_pair]
            if self.failing_pair
            else None,
            "failing_states": list(self.failing_states) if self.failing_states else None,
            "laws": [r.as_json() for r in self.law_reports],
            "alphabet": list(self.alphabet),
            "max_size": self.max_size,
            "note": self.note,
        }


def _resolve_alphabet(adt, alphabet):
    if alphabet is None:
        return sorted(adt.alphabet, key=symbol_key)
    symbols = sorted(set(alphabet), key=symbol_key)
    for sym in symbols:
        if sym not in adt.alphabet:
            raise UnknownSymbolError(sym, adt.name)
    return symbols


def _state_reps(adt, clause_set):
    """One representative clause per distinct reachable state.

    Enumeration order is size-first, so each representative is a
    minimal clause for its state; law witnesses built from
    representatives are therefore minimal too.
    """
    ev = memoized_evaluator(adt)
    reps = []
    seen = set()
    for clause in clause_set:
        state = ev.state(clause)
        key = adt.render_state(state)
        if key not in seen:
            seen.add(key)
            reps.append((clause, state))
    return reps


def _sorted_tuples(sizes, arity):
    """Index tuples ordered by total clause size, then position."""
    indices = range(len(sizes))
    if arity == 2:
        pairs = [(i, j) for i, j in product(indices, repeat=2) if i < j]
        return sorted(pairs, key=lambda t: (sizes[t[0]] + sizes[t[1]], t))
    tuples = product(indices, repeat=arity)
    return sorted(tuples, key=lambda t: (sum(sizes[i] for i in t), t))


def check_laws(adt, alphabet=None, max_size=4, samples=0, seed=0, budget=None):
    """All four SEC laws over the enumerated clause universe.

    Returns one LawReport per law, first violation as minimal witness.
    """
    if adt.merge is None:
        raise MergeUnavailableError(adt.name)
    symbols = _resolve_alphabet(adt, alphabet)
    clause_set = enumerate_clauses(symbols, max_size, budget)
    reps = _state_reps(adt, clause_set)
    sizes = [c.size for c, _ in reps]
    merge = adt.merge
    rs = adt.render_state
    witnesses = {}

    # law 1: a write is a merge with a fresh single-write clause
    for clause, state in reps:
        hit = False
        for sym in symbols:
            lhs_state = adt.write(state, sym)
            rhs_state = merge(state, adt.write(adt.initial, sym))
            if lhs_state != rhs_state:
                witnesses["write-as-merge"] = LawWitness(
                    (clause,),
                    Write(clause, sym),
                    Merge(clause, Write(INITIAL, sym)),
                    rs(lhs_state),
                    rs(rhs_state),
                )
                hit = True
                break
        if hit:
            break

    for i, j, k in _sorted_tuples(sizes, 3):
        if "associativity" in witnesses:
            break
        ci, si = reps[i]
        cj, sj = reps[j]
        ck, sk = reps[k]
        lhs_state = merge(merge(si, sj), sk)
        rhs_state = merge(si, merge(sj, sk))
        if lhs_state != rhs_state:
            witnesses["associativity"] = LawWitness(
                (ci, cj, ck),
                Merge(Merge(ci, cj), ck),
                Merge(ci, Merge(cj, ck)),
                rs(lhs_state),
                rs(rhs_state),
            )

    for i, j in _sorted_tuples(sizes, 2):
        ci, si = reps[i]
        cj, sj = reps[j]
        lhs_state = merge(si, sj)
        rhs_state = merge(sj, si)
        if lhs_state != rhs_state:
            witnesses["commutativity"] = LawWitness(
                (ci, cj), Merge(ci, cj), Merge(cj, ci), rs(lhs_state), rs(rhs_state)
            )
            break

    for clause, state in reps:
        lhs_state = merge(state, state)
        if lhs_state != state:
            witnesses["idempotence"] = LawWitness(
                (clause,), Merge(clause, clause), clause, rs(lhs_state), rs(state)
            )
            break

    if samples > 0:
        _sample_laws(adt, symbols, max_size, samples, seed, witnesses)

    return [
        LawReport(
            law=law,
            holds=law not in witnesses,
            witness=witnesses.get(law),
            alphabet=tuple(symbols),
            max_size=max_size,
            samples=samples,
            seed=seed if samples > 0 else None,
        )
        for law in LAWS
    ]


def _sample_laws(adt, symbols, max_size, samples, seed, witnesses):
    """Randomized supplement: law checks on clauses past the exhaustive bound."""
    rng = SplitMix64(seed)
    ev = memoized_evaluator(adt)
    merge = adt.merge
    rs = adt.render_state
    sample_size = max(2, 2 * max_size)
    for _ in range(samples):
        c = random_clause(symbols, sample_size, rng)
        c1 = random_clause(symbols, sample_size, rng)
        c2 = random_clause(symbols, sample_size, rng)
        s, s1, s2 = ev.state(c), ev.state(c1), ev.state(c2)
        if symbols and "write-as-merge" not in witnesses:
            sym = symbols[rng.bounded(len(symbols))]
            lhs = adt.write(s, sym)
            rhs = merge(s, adt.write(adt.initial, sym))
            if lhs != rhs:
                witnesses["write-as-merge"] = LawWitness(
                    (c,), Write(c, sym), Merge(c, Write(INITIAL, sym)), rs(lhs), rs(rhs)
                )
        if "associativity" not in witnesses:
            lhs, rhs = merge(merge(s, s1), s2), merge(s, merge(s1, s2))
            if lhs != rhs:
                witnesses["associativity"] = LawWitness(
                    (c, c1, c2),
                    Merge(Merge(c, c1), c2),
                    Merge(c, Merge(c1, c2)),
                    rs(lhs),
                    rs(rhs),
                )
        if "commutativity" not in witnesses:
            lhs, rhs = merge(s1, s2), merge(s2, s1)
            if lhs != rhs:
                witnesses["commutativity"] = LawWitness(
                    (c1, c2), Merge(c1, c2), Merge(c2, c1), rs(lhs), rs(rhs)
                )
        if "idempotence" not in witnesses:
            lhs = merge(s1, s1)
            if lhs != s1:
                witnesses["idempotence"] = LawWitness(
                    (c1,), Merge(c1, c1), c1, rs(lhs), rs(s1)
                )


def check_sec_definition(
    adt, alphabet=None, max_size=4, law_max_size=None, samples=0, seed=0, budget=None
):
    """The SEC definition, exhaustively at the bound.

    Groups enumerated clauses by input set and requires equal states
    within each group. The first violating pair (ordered by the later
    clause, then the earlier) is reported, law reports attached.
    """
    if adt.merge is None:
        raise MergeUnavailableError(adt.name)
    symbols = _resolve_alphabet(adt, alphabet)
    clause_set = enumerate_clauses(symbols, max_size, budget)
    ev = memoized_evaluator(adt)

    groups = {}
    failing_pair = None
    failing_states = None
    for clause in clause_set:
        state = ev.state(clause)
        ref = groups.get(clause.inputs)
        if ref is None:
            groups[clause.inputs] = (clause, state)
        elif failing_pair is None and state != ref[1]:
            failing_pair = (ref[0], clause)
            failing_states = (adt.render_state(ref[1]), adt.render_state(state))

    law_reports = check_laws(
        adt,
        alphabet=symbols,
        max_size=law_max_size or max_size,
        samples=samples,
        seed=seed,
        budget=budget,
    )
    holds = failing_pair is None
    if holds:
        outcome = "sec-holds"
    elif any(not r.holds for r in law_reports):
        outcome = "sec-fails-law-witness"
    else:
        outcome = "sec-fails-no-law-witness"
    return SecVerdict(
        sec_up_to_bound=holds,
        failing_pair=failing_pair,
        failing_states=failing_states,
        law_reports=tuple(law_reports),
        outcome=outcome,
        alphabet=tuple(symbols),
        max_size=max_size,
        note=_REPEAT_NOTE.format(max_size=max_size),
    )


def normalize(clause):
    """Canonical form: s0 merged with one single-write clause per input.

    s0 M (s0 W i1) M (s0 W i2) ... with inputs sorted ascending. For an
    ADT satisfying the four laws this preserves the evaluated state.
    """
    acc = INITIAL
    for sym in sorted(clause.inputs, key=symbol_key):
        acc = Merge(acc, Write(INITIAL, sym))
    return acc
