"""Deterministic replay: schedules, crossing gossip, partitions, DOT export."""

import json
from pathlib import Path

import pytest

from calmcheck.adt import AbstractDataType
from calmcheck.catalog import deadlock_problem, gc_problem
from calmcheck.clauses import parse
from calmcheck.simulator import (
    GossipEvent,
    PartitionWindow,
    QueryEvent,
    Scenario,
    ScenarioError,
    WriteEvent,
    default_gossip_rounds,
    load_scenario,
    observe_partition_consistency,
    random_scenario,
    render_dot,
    run,
    scenario_from_json,
)

SCENARIO_PATH = Path(__file__).resolve().parent.parent / "scenarios" / "cross_gossip.json"

C7_TEXT = "((s0 W i1) M (s0 W i2) W i3) M ((s0 W i2) M (s0 W i1) W i4)"
C8_TEXT = "((s0 W i2) M (s0 W i1) W i4) M ((s0 W i1) M (s0 W i2) W i3)"


def gset_scenario(events, replicas=2, partitions=(), gossip_rounds=0, symbols=None):
    return Scenario(
        adt="gset",
        params={"symbols": symbols or ["i1", "i2", "i3", "i4"]},
        replicas=replicas,
        events=tuple(events),
        partitions=tuple(partitions),
        seed=0,
        gossip_rounds=gossip_rounds,
    )


def test_cross_gossip_replay_builds_the_expected_trees():
    report = run(load_scenario(SCENARIO_PATH))
    assert report.final_clauses[0] == parse(C7_TEXT)
    assert report.final_clauses[1] == parse(C8_TEXT)
    assert report.converged
    assert report.final_state_texts == ("{i1, i2, i3, i4}",) * 2
    assert not report.dropped


def test_gossip_defaults_to_current_snapshot():
    report = run(gset_scenario([
        WriteEvent(1, 0, "i1"),
        WriteEvent(2, 1, "i2"),
        GossipEvent(3, 0, 1),          # payload: replica 0 now
        GossipEvent(4, 1, 0),          # payload: replica 1 now, merge included
    ]))
    assert report.final_clauses[1] == parse("(s0 W i2) M (s0 W i1)")
    assert report.final_clauses[0] == parse("(s0 W i1) M ((s0 W i2) M (s0 W i1))")


def test_sent_at_replays_an_older_snapshot():
    report = run(gset_scenario([
        WriteEvent(1, 0, "i1"),
        WriteEvent(2, 0, "i2"),
        GossipEvent(3, 0, 1, sent_at=1),   # before i2 existed
    ]))
    assert report.final_clauses[1] == parse("s0 M (s0 W i1)")


def test_sent_at_zero_sends_the_initial_state():
    report = run(gset_scenario([
        WriteEvent(1, 0, "i1"),
        GossipEvent(2, 0, 1, sent_at=0),
    ]))
    assert report.final_clauses[1] == parse("s0 M s0")


def test_partition_drops_gossip_and_leaves_clauses_alone():
    report = run(gset_scenario(
        [
            WriteEvent(1, 0, "i1"),
            GossipEvent(2, 0, 1),                 # dropped: window [2, 3)
            WriteEvent(3, 1, "i2"),
            GossipEvent(4, 0, 1),                 # delivered: window closed
        ],
        partitions=[PartitionWindow(2, 3, frozenset({0}))],
    ))
    assert len(report.dropped) == 1
    drop = report.dropped[0]
    assert (drop.step, drop.src, drop.dst, drop.reason) == (2, 0, 1, "partition")
    assert report.applied_events == 3
    assert report.final_clauses[1] == parse("(s0 W i2) M (s0 W i1)")


def test_partition_only_separates_across_the_group():
    window = PartitionWindow(1, 5, frozenset({0, 1}))
    assert window.separates(0, 2, 3)
    assert not window.separates(0, 1, 3)
    assert not window.separates(2, 3, 3)
    assert not window.separates(0, 2, 5)  # half open: step 5 is outside


def test_queries_record_intermediate_outputs():
    report = run(gset_scenario([
        WriteEvent(1, 0, "i1"),
        QueryEvent(2, 0),
        QueryEvent(3, 1),
        WriteEvent(4, 0, "i2"),
        QueryEvent(5, 0),
    ], replicas=2))
    texts = [(q.step, q.replica, q.text) for q in report.queries]
    assert texts == [(2, 0, "{i1}"), (3, 1, "{}"), (5, 0, "{i1, i2}")]


def test_final_ring_rounds_disseminate_everything():
    for replicas in (2, 3, 4, 5):
        symbols = [f"s{r}" for r in range(replicas)]
        events = [WriteEvent(r + 1, r, symbols[r]) for r in range(replicas)]
        report = run(gset_scenario(
            events, replicas=replicas, gossip_rounds=2, symbols=symbols,
        ))
        assert report.converged
        for clause in report.final_clauses:
            assert clause.inputs == frozenset(symbols)
        assert report.final_merges == 2 * replicas


def test_single_replica_needs_no_gossip():
    report = run(gset_scenario(
        [WriteEvent(1, 0, "i1"), QueryEvent(2, 0)],
        replicas=1, gossip_rounds=3,
    ))
    assert report.converged
    assert report.final_merges == 0
    assert report.final_clauses[0] == parse("s0 W i1")


def test_sum_counter_double_counts_after_ring_gossip():
    scenario = Scenario(
        adt="sum-counter", params={"alphabet_size": 2}, replicas=2,
        events=(WriteEvent(1, 0, "1"), WriteEvent(2, 1, "2")),
        partitions=(), seed=0, gossip_rounds=2,
    )
    report = run(scenario)
    assert not report.converged
    # pre-gossip sums a=1, b=2; the two ring rounds give 5a+3b vs 3a+2b
    assert report.final_states == (11, 7)


# ---- partition consistency observations ---------------------------------------


def gc_scenario(events, gossip_rounds=0):
    return Scenario(
        adt="gc", params={"nodes": 2}, replicas=1,
        events=tuple(events), partitions=(), seed=0,
        gossip_rounds=gossip_rounds,
    )


def test_observation_catches_a_retracted_output():
    report = run(gc_scenario([
        WriteEvent(1, 0, "0_0"),
        WriteEvent(2, 0, "1_1"),
        QueryEvent(3, 0),          # collectible: {1}
        WriteEvent(4, 0, "0_1"),   # now 1 is reachable
    ]))
    observed = observe_partition_consistency(report, gc_problem(2))
    assert not observed.holds
    assert observed.violations == 1
    obs = observed.observations[0]
    assert (obs.step, obs.replica, obs.output, obs.final_output) == (3, 0, "{1}", "{}")
    assert not obs.consistent


def test_observation_passes_for_monotone_problem():
    scenario = Scenario(
        adt="deadlock", params={"nodes": 2}, replicas=1,
        events=(
            WriteEvent(1, 0, "1_2"),
            QueryEvent(2, 0),
            WriteEvent(3, 0, "2_1"),
            QueryEvent(4, 0),
        ),
        partitions=(), seed=0, gossip_rounds=0,
    )
    observed = observe_partition_consistency(run(scenario), deadlock_problem(2))
    assert observed.holds
    assert observed.violations == 0
    assert [o.output for o in observed.observations] == ["{}", "{(1,2), (2,1)}"]


def test_run_accepts_a_custom_adt():
    # not in the registry: run() must skip the name lookup entirely
    pair_max = AbstractDataType(
        name="pair-max",
        alphabet=frozenset({"p", "q"}),
        initial=0,
        write=lambda s, i: max(s, {"p": 1, "q": 2}[i]),
        query=lambda s: s,
        merge=max,
    )
    scenario = Scenario(
        adt="pair-max", params={}, replicas=2,
        events=(
            WriteEvent(1, 0, "p"),
            WriteEvent(2, 1, "q"),
            GossipEvent(3, 0, 1),
        ),
        partitions=(), seed=0, gossip_rounds=0,
    )
    report = run(scenario, adt=pair_max)
    assert report.final_states == (1, 2)
    assert not report.converged


# ---- scenario validation --------------------------------------------------------


def test_validation_field_errors():
    cases = [
        (gset_scenario([WriteEvent(1, 0, "i1"), WriteEvent(1, 1, "i2")]),
         "events[1].step"),
        (gset_scenario([WriteEvent(1, 0, "i1"), WriteEvent(2, 0, "i1")]),
         "events[1].symbol"),
        (gset_scenario([WriteEvent(1, 5, "i1")]), "events[0].replica"),
        (gset_scenario([GossipEvent(1, 0, 0)]), "events[0].dst"),
        (gset_scenario([GossipEvent(1, 0, 1, sent_at=2)]), "events[0].sent_at"),
        (gset_scenario([QueryEvent(1, 9)]), "events[0].replica"),
        (gset_scenario([WriteEvent(1, 0, "i1")],
                       partitions=[PartitionWindow(1, 1, frozenset({0}))]),
         "partitions[0].end"),
        (gset_scenario([WriteEvent(1, 0, "i1")],
                       partitions=[PartitionWindow(1, 9, frozenset({0}))]),
         "partitions[0].end"),
        (gset_scenario([WriteEvent(1, 0, "i1")],
                       partitions=[PartitionWindow(1, 2, frozenset({0, 1}))]),
         "partitions[0].group"),
        (gset_scenario([WriteEvent(1, 0, "i1")],
                       partitions=[PartitionWindow(1, 2, frozenset())]),
         "partitions[0].group"),
    ]
    for scenario, field in cases:
        with pytest.raises(ScenarioError) as err:
            run(scenario)
        assert field in str(err.value), field


def test_unknown_write_symbol_rejected_at_run():
    with pytest.raises(ScenarioError) as err:
        run(gset_scenario([WriteEvent(1, 0, "zz")]))
    assert "events[0].symbol" in str(err.value)


def test_unknown_adt_name_rejected():
    scenario = Scenario(
        adt="mystery", params={}, replicas=1,
        events=(), partitions=(), seed=0, gossip_rounds=0,
    )
    with pytest.raises(ScenarioError) as err:
        run(scenario)
    assert "adt" in str(err.value)


def test_scenario_json_schema_errors():
    with pytest.raises(ScenarioError):
        scenario_from_json([])
    with pytest.raises(ScenarioError) as err:
        scenario_from_json({"version": 1, "adt": "gset", "replicas": 1,
                            "events": [{"step": 1}]})
    assert "events[0]" in str(err.value)
    with pytest.raises(ScenarioError) as err:
        scenario_from_json({"version": 1, "adt": "gset", "replicas": 1,
                            "events": [{"step": 1, "type": "write"}]})
    assert "replica" in str(err.value)
    with pytest.raises(ScenarioError) as err:
        scenario_from_json({"version": 2, "adt": "gset", "replicas": 1, "events": []})
    assert "version" in str(err.value)
    with pytest.raises(ScenarioError) as err:
        scenario_from_json({"version": 1, "adt": "gset", "replicas": 1,
                            "events": [{"step": 1, "type": "sleep"}]})
    assert "sleep" in str(err.value)


def test_scenario_json_round_trip():
    scenario = load_scenario(SCENARIO_PATH)
    assert scenario_from_json(scenario.as_json()) == scenario
    for seed in range(25):
        generated = random_scenario("gset", replicas=3, steps=10, seed=seed)
        assert scenario_from_json(generated.as_json()) == generated


# ---- seeded generation ------------------------------------------------------------


def test_default_gossip_rounds_schedule():
    assert [default_gossip_rounds(r) for r in (1, 2, 3, 4, 5, 8, 9)] == [
        0, 2, 3, 3, 4, 4, 5,
    ]


def test_random_scenario_is_deterministic():
    a = random_scenario("gset", replicas=3, steps=12, seed=99)
    b = random_scenario("gset", replicas=3, steps=12, seed=99)
    assert a == b
    assert json.dumps(run(a).as_json()) == json.dumps(run(b).as_json())


def test_random_scenario_is_valid_and_runs():
    for seed in range(60):
        scenario = random_scenario("gset", replicas=2 + seed % 3, steps=8, seed=seed)
        report = run(scenario)
        assert report.converged  # gset always converges after the ring rounds


def test_random_sum_counter_always_diverges_at_two_replicas():
    # with positive sums a, b the ring rounds end at 5a+3b vs 3a+2b
    for seed in range(50):
        scenario = random_scenario("sum-counter", replicas=2, steps=8, seed=seed)
        assert not run(scenario).converged


# ---- report and DOT ----------------------------------------------------------------


def test_report_json_shape():
    payload = run(load_scenario(SCENARIO_PATH)).as_json()
    assert payload["adt"] == "gset"
    assert payload["converged"] is True
    assert payload["replicas"] == 2
    assert [entry["replica"] for entry in payload["final"]] == [0, 1]
    assert payload["final"][1]["clause"] == C8_TEXT
    assert payload["final"][1]["clause_size"] == 13
    json.dumps(payload)


def test_huge_clauses_reported_by_size_only():
    events = []
    step = 0
    for round_no in range(18):
        step += 1
        events.append(GossipEvent(step, (round_no % 2), (round_no + 1) % 2))
    step += 1
    events.append(WriteEvent(step, 0, "i1"))
    scenario = gset_scenario(events, gossip_rounds=2)
    payload = run(scenario).as_json()
    sizes = [entry["clause_size"] for entry in payload["final"]]
    assert max(sizes) > 10_000
    assert any(entry["clause"] is None for entry in payload["final"])


def test_render_dot_structure():
    report = run(load_scenario(SCENARIO_PATH))
    dot = render_dot(report)
    assert dot.startswith("digraph trace {")
    assert dot.rstrip().endswith("}")
    assert "cluster_r0" in dot and "cluster_r1" in dot
    assert dot.count("style=dashed") == 4  # one per delivered gossip
    assert 'label="W i1"' in dot
    assert "rankdir=LR" in dot
    assert render_dot(report) == dot


def test_render_dot_skips_dropped_gossip():
    report = run(gset_scenario(
        [
            WriteEvent(1, 0, "i1"),
            GossipEvent(2, 0, 1),
        ],
        partitions=[PartitionWindow(2, 3, frozenset({1}))],
    ))
    dot = render_dot(report)
    assert "style=dashed" not in dot
    assert 'label="M"' not in dot


def test_render_dot_marks_final_ring_merges():
    report = run(gset_scenario(
        [WriteEvent(1, 0, "i1"), WriteEvent(2, 1, "i2")],
        gossip_rounds=1,
    ))
    dot = render_dot(report)
    assert dot.count('label="M final"') == 2
