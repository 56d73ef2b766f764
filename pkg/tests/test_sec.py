"""Strong eventual consistency: the four laws and the definition check."""

import json

import pytest

from calmcheck.adt import AbstractDataType, UnknownSymbolError, evaluate
from calmcheck.catalog import gset_adt, max_register_adt, sum_counter_adt
from calmcheck.clauses import INITIAL, enumerate_clauses, parse
from calmcheck.sec import LAWS, check_laws, check_sec_definition, normalize

GSET = gset_adt(("a", "b"))
COUNTER = sum_counter_adt(2)


def law_by_name(reports, name):
    return next(r for r in reports if r.law == name)


def test_laws_enumerate_all_four():
    assert LAWS == ("write-as-merge", "associativity", "commutativity", "idempotence")
    reports = check_laws(GSET, max_size=3)
    assert [r.law for r in reports] == list(LAWS)


def test_gset_satisfies_all_laws():
    for report in check_laws(GSET, max_size=4):
        assert report.holds
        assert report.witness is None


def test_max_register_satisfies_all_laws():
    for report in check_laws(max_register_adt(2), max_size=4):
        assert report.holds


def test_gset_passes_sec_definition():
    verdict = check_sec_definition(GSET, max_size=4)
    assert verdict.sec_up_to_bound
    assert verdict.outcome == "sec-holds"
    assert verdict.failing_pair is None
    assert verdict.failing_states is None


def test_sum_counter_fails_idempotence_with_exact_witness():
    verdict = check_sec_definition(COUNTER, max_size=4)
    assert not verdict.sec_up_to_bound
    assert verdict.outcome == "sec-fails-law-witness"

    idem = law_by_name(verdict.law_reports, "idempotence")
    assert not idem.holds
    assert idem.witness.lhs == parse("(s0 W 1) M (s0 W 1)")
    assert idem.witness.rhs == parse("s0 W 1")
    assert idem.witness.lhs_state == "2"
    assert idem.witness.rhs_state == "1"
    # the states themselves, not only their rendering
    assert evaluate(COUNTER, parse("(s0 W 1) M (s0 W 1)")) == 2
    assert evaluate(COUNTER, parse("s0 W 1")) == 1


def test_sum_counter_failing_pair_shares_inputs():
    verdict = check_sec_definition(COUNTER, max_size=4)
    c1, c2 = verdict.failing_pair
    assert c1.inputs == c2.inputs
    assert evaluate(COUNTER, c1) != evaluate(COUNTER, c2)
    assert c1 == parse("s0 W 1")
    assert c2 == parse("s0 W 1 W 1")
    assert verdict.failing_states == ("1", "2")


def test_sum_counter_passes_assoc_and_comm():
    reports = check_laws(COUNTER, max_size=4)
    assert law_by_name(reports, "associativity").holds
    assert law_by_name(reports, "commutativity").holds
    assert not law_by_name(reports, "idempotence").holds


def test_noncommutative_merge_is_caught():
    first_wins = AbstractDataType(
        name="first-wins",
        alphabet=frozenset({"a", "b"}),
        initial="",
        write=lambda s, i: s + i,
        query=lambda s: s,
        merge=lambda s1, s2: s1,
    )
    reports = check_laws(first_wins, max_size=3)
    assert not law_by_name(reports, "commutativity").holds
    assert not law_by_name(reports, "write-as-merge").holds
    verdict = check_sec_definition(first_wins, max_size=3)
    assert not verdict.sec_up_to_bound
    assert verdict.outcome == "sec-fails-law-witness"


def test_write_as_merge_law_isolated():
    # E(c W i) must equal E(c M (s0 W i)); a write that depends on how
    # many writes preceded it breaks exactly this law and no other
    history = AbstractDataType(
        name="history-register",
        alphabet=frozenset({"a"}),
        initial=0,
        write=lambda s, i: 2 * s + 1,
        query=lambda s: s,
        merge=max,
    )
    reports = check_laws(history, max_size=3)
    assert not law_by_name(reports, "write-as-merge").holds
    assert law_by_name(reports, "associativity").holds
    assert law_by_name(reports, "commutativity").holds
    assert law_by_name(reports, "idempotence").holds
    wam = law_by_name(reports, "write-as-merge")
    assert wam.witness is not None
    assert wam.witness.lhs_state != wam.witness.rhs_state


def test_restricting_alphabet():
    verdict = check_sec_definition(GSET, alphabet=("a",), max_size=4)
    assert verdict.sec_up_to_bound
    assert verdict.alphabet == ("a",)
    with pytest.raises(UnknownSymbolError):
        check_laws(GSET, alphabet=("a", "zzz"))


def test_empty_alphabet_is_vacuously_consistent():
    verdict = check_sec_definition(GSET, alphabet=(), max_size=4)
    assert verdict.sec_up_to_bound
    for report in verdict.law_reports:
        assert report.holds


def test_randomized_supplement_is_deterministic():
    a = check_laws(GSET, max_size=3, samples=60, seed=9)
    b = check_laws(GSET, max_size=3, samples=60, seed=9)
    assert [r.as_json() for r in a] == [r.as_json() for r in b]
    for report in a:
        assert report.holds
        assert report.samples == 60
        assert report.seed == 9


def test_randomized_supplement_reaches_past_the_bound():
    # merge misbehaves only when both states hold >= 4 symbols; clauses
    # at the exhaustive bound (size 4, <= 3 writes) never build such a
    # state, sampled clauses (size up to 8) do
    poisoned = AbstractDataType(
        name="big-set-bias",
        alphabet=frozenset({"a", "b", "c", "d", "e", "f"}),
        initial=frozenset(),
        write=lambda s, i: s | {i},
        query=lambda s: s,
        merge=lambda s1, s2: (
            s1 | s2 if min(len(s1), len(s2)) < 4 or s1 == s2 else s1
        ),
    )
    at_bound = check_laws(poisoned, max_size=4)
    assert all(r.holds for r in at_bound)
    sampled = check_laws(poisoned, max_size=4, samples=400, seed=11)
    assert not law_by_name(sampled, "commutativity").holds


def test_verdict_json_shape():
    verdict = check_sec_definition(COUNTER, max_size=3)
    payload = verdict.as_json()
    assert set(payload) == {
        "sec_up_to_bound", "failing_pair", "failing_states", "laws",
        "outcome", "alphabet", "max_size", "note",
    }
    assert payload["failing_pair"] == ["s0 W 1", "s0 W 1 W 1"]
    json.dumps(payload)  # nothing unserializable leaks through


def test_sec_requires_a_merge_function():
    from calmcheck.adt import MergeUnavailableError, as_object

    with pytest.raises(MergeUnavailableError):
        check_sec_definition(as_object(GSET), max_size=3)


def test_laws_imply_sec_and_sec_implies_laws():
    # both directions of the correspondence, at the bound, per registry ADT
    for adt in (GSET, max_register_adt(2), COUNTER):
        verdict = check_sec_definition(adt, max_size=4)
        laws_hold = all(r.holds for r in verdict.law_reports)
        assert verdict.sec_up_to_bound == laws_hold


def test_normalize_fixtures():
    assert normalize(INITIAL) == INITIAL
    assert normalize(parse("(s0 W b) M (s0 W a)")) == parse("s0 M (s0 W a) M (s0 W b)")
    assert normalize(parse("s0 W a W a")) == parse("s0 M (s0 W a)")
    assert normalize(parse("s0 W b W a")) == normalize(parse("(s0 W a) M (s0 W b)"))


def test_normalize_preserves_gset_state():
    for clause in enumerate_clauses(("a", "b"), 5):
        assert evaluate(GSET, clause) == evaluate(GSET, normalize(clause))
        assert normalize(clause).inputs == clause.inputs
