"""Deterministic multi-replica execution of write/gossip/query schedules.

Each replica holds a clause, initially s0. The schedule is a list of
events at strictly increasing steps:

 - write(replica, symbol): the replica's clause grows by one write
 - gossip(src, dst[, sent_at]): dst's clause becomes
   Merge(dst clause, src clause); the payload is src's clause as of the
   end of step sent_at (default: current), so in-flight exchanges can
   cross. A gossip crossing an active partition boundary is dropped and
   logged, never applied.
 - query(replica): the replica's query output is recorded at that point

Partitions are half-open step windows [start, end) splitting the
replicas into a group and its complement. After the schedule, the
configured number of final gossip rounds runs in a fixed ring order
(0->1, 1->2, .., R-1->0 per round, applied sequentially); two or more
rounds guarantee every write reaches every replica. Everything is a
pure function of the scenario, so reports replay bit for bit.
"""

import json
from dataclasses import dataclass
from typing import Optional

from .adt import memoized_evaluator
from .clauses import INITIAL, Merge, Write, render, symbol_key
from .catalog import build_adt
from .rng import SplitMix64

SCENARIO_VERSION = 1
CLAUSE_TEXT_CAP = 10_000  # trees above this size are reported by size only


class ScenarioError(ValueError):
    """Scenario schema or semantics violation, with the offending field."""

    def __init__(self, field_name, message):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class WriteEvent:
    step: int
    replica: int
    symbol: str

    def as_json(self):
        return {"step": self.step, "type": "write", "replica": self.replica, "symbol": self.symbol}


@dataclass(frozen=True)
class GossipEvent:
    step: int
    src: int
    dst: int
    sent_at: Optional[int] = None  # payload snapshot step; None = current

    def as_json(self):
        out = {"step": self.step, "type": "gossip", "src": self.src, "dst": self.dst}
        if self.sent_at is not None:
            out["sent_at"] = self.sent_at
        return out


@dataclass(frozen=True)
class QueryEvent:
    step: int
    replica: int

    def as_json(self):
        return {"step": self.step, "type": "query", "replica": self.replica}


@dataclass(frozen=True)
class PartitionWindow:
    start: int
    end: int  # exclusive
    group: frozenset

    def separates(self, a, b, step):
        if not (self.start <= step < self.end):
            return False
        return (a in self.group) != (b in self.group)

    def as_json(self):
        return {"start": self.start, "end": self.end, "group": sorted(self.group)}


@dataclass(frozen=True)
class Scenario:
    adt: str
    params: dict
    replicas: int
    events: tuple
    partitions: tuple
    seed: int
    gossip_rounds: int
    version: int = SCENARIO_VERSION

    def as_json(self):
        return {
            "version": self.version,
            "adt": self.adt,
            "params": dict(self.params),
            "replicas": self.replicas,
            "seed": self.seed,
            "gossip_rounds": self.gossip_rounds,
            "events": [e.as_json() for e in self.events],
            "partitions": [p.as_json() for p in self.partitions],
        }


@dataclass(frozen=True)
class QueryRecord:
    step: int
    replica: int
    value: object
    text: str

    def as_json(self):
        return {"step": self.step, "replica": self.replica, "output": self.text}


@dataclass(frozen=True)
class DroppedGossip:
    step: int
    src: int
    dst: int
    reason: str

    def as_json(self):
        return {"step": self.step, "src": self.src, "dst": self.dst, "reason": self.reason}


@dataclass(frozen=True)
class TraceReport:
    scenario: Scenario
    final_clauses: tuple
    final_states: tuple  # raw state values
    final_state_texts: tuple
    final_outputs: tuple  # raw query outputs
    final_output_texts: tuple
    queries: tuple
    dropped: tuple
    applied_events: int
    final_merges: int
    converged: bool

    def as_json(self):
        final = []
        for r, clause in enumerate(self.final_clauses):
            entry = {
                "replica": r,
                "clause": render(clause) if clause.size <= CLAUSE_TEXT_CAP else None,
                "clause_size": clause.size,
                "state": self.final_state_texts[r],
                "output": self.final_output_texts[r],
            }
            final.append(entry)
        return {
            "version": SCENARIO_VERSION,
            "adt": self.scenario.adt,
            "replicas": self.scenario.replicas,
            "seed": self.scenario.seed,
            "converged": self.converged,
            "applied_events": self.applied_events,
            "final_merges": self.final_merges,
            "final": final,
            "queries": [q.as_json() for q in self.queries],
            "dropped": [d.as_json() for d in self.dropped],
        }


# ---- scenario construction and validation -----------------------------------


def _require(condition, field_name, message):
    if not condition:
        raise ScenarioError(field_name, message)


def validate_scenario(scenario, adt=None):
    """Structural and semantic checks; raises ScenarioError on the first."""
    _require(scenario.version == SCENARIO_VERSION, "version",
             f"expected {SCENARIO_VERSION}, got {scenario.version}")
    _require(scenario.replicas >= 1, "replicas", "need at least one replica")
    _require(scenario.gossip_rounds >= 0, "gossip_rounds", "must be >= 0")

    last_step = 0
    written = set()
    for idx, event in enumerate(scenario.events):
        where = f"events[{idx}]"
        _require(event.step > last_step, f"{where}.step",
                 f"steps must strictly increase ({event.step} after {last_step})")
        last_step = event.step
        if isinstance(event, WriteEvent):
            _require(0 <= event.replica < scenario.replicas, f"{where}.replica",
                     "replica index out of range")
            _require(event.symbol not in written, f"{where}.symbol",
                     f"symbol {event.symbol!r} written more than once")
            written.add(event.symbol)
            if adt is not None:
                _require(event.symbol in adt.alphabet, f"{where}.symbol",
                         f"symbol {event.symbol!r} not in the ADT alphabet")
        elif isinstance(event, GossipEvent):
            _require(0 <= event.src < scenario.replicas, f"{where}.src",
                     "replica index out of range")
            _require(0 <= event.dst < scenario.replicas, f"{where}.dst",
                     "replica index out of range")
            _require(event.src != event.dst, f"{where}.dst",
                     "gossip needs two distinct replicas")
            if event.sent_at is not None:
                _require(0 <= event.sent_at <= event.step, f"{where}.sent_at",
                         "snapshot step must lie in [0, step]")
        elif isinstance(event, QueryEvent):
            _require(0 <= event.replica < scenario.replicas, f"{where}.replica",
                     "replica index out of range")
        else:
            raise ScenarioError(where, f"unknown event {event!r}")

    for idx, window in enumerate(scenario.partitions):
        where = f"partitions[{idx}]"
        _require(window.start >= 1, f"{where}.start", "steps start at 1")
        _require(window.end > window.start, f"{where}.end", "window must be nonempty")
        _require(window.end <= last_step + 1, f"{where}.end",
                 "window must close before the final gossip phase")
        _require(all(0 <= r < scenario.replicas for r in window.group),
                 f"{where}.group", "replica index out of range")
        _require(0 < len(window.group) < scenario.replicas, f"{where}.group",
                 "group must be a nonempty proper subset of the replicas")


def scenario_from_json(data):
    """Build a Scenario from the documented JSON schema."""
    if not isinstance(data, dict):
        raise ScenarioError("scenario", "top level must be an object")
    for key in ("version", "adt", "replicas", "events"):
        if key not in data:
            raise ScenarioError(key, "missing required field")
    events = []
    for idx, raw in enumerate(data["events"]):
        where = f"events[{idx}]"
        if not isinstance(raw, dict) or "type" not in raw or "step" not in raw:
            raise ScenarioError(where, "event needs type and step")
        kind = raw["type"]
        try:
            if kind == "write":
                events.append(WriteEvent(raw["step"], raw["replica"], raw["symbol"]))
            elif kind == "gossip":
                events.append(
                    GossipEvent(raw["step"], raw["src"], raw["dst"], raw.get("sent_at"))
                )
            elif kind == "query":
                events.append(QueryEvent(raw["step"], raw["replica"]))
            else:
                raise ScenarioError(f"{where}.type", f"unknown event type {kind!r}")
        except KeyError as exc:
            raise ScenarioError(where, f"missing field {exc.args[0]!r}") from None
    windows = []
    for idx, raw in enumerate(data.get("partitions", [])):
        where = f"partitions[{idx}]"
        try:
            windows.append(
                PartitionWindow(raw["start"], raw["end"], frozenset(raw["group"]))
            )
        except (KeyError, TypeError):
            raise ScenarioError(where, "window needs start, end, group") from None
    scenario = Scenario(
        adt=data["adt"],
        params=data.get("params", {}),
        replicas=data["replicas"],
        events=tuple(events),
        partitions=tuple(windows),
        seed=data.get("seed", 0),
        gossip_rounds=data.get("gossip_rounds", 0),
        version=data["version"],
    )
    validate_scenario(scenario)
    return scenario


def load_scenario(path):
    with open(path, "r", encoding="utf-8") as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ScenarioError("scenario", f"not valid JSON: {exc}") from None
    return scenario_from_json(data)


# ---- execution ---------------------------------------------------------------


def _separated(partitions, a, b, step):
    return any(w.separates(a, b, step) for w in partitions)


def run(scenario, adt=None):
    """Execute the schedule and the final gossip rounds; report everything."""
    if adt is None:
        try:
            adt = build_adt(scenario.adt, **scenario.params)
        except TypeError as exc:
            raise ScenarioError("params", str(exc)) from None
        except ValueError as exc:
            raise ScenarioError("adt", str(exc)) from None
    validate_scenario(scenario, adt)

    evaluator = memoized_evaluator(adt)
    clauses = [INITIAL] * scenario.replicas
    history = [[(0, INITIAL)] for _ in range(scenario.replicas)]
    queries = []
    dropped = []
    applied = 0

    def snapshot(replica, step):
        # clause as of the end of the given step
        for past_step, clause in reversed(history[replica]):
            if past_step <= step:
                return clause
        return INITIAL

    for event in scenario.events:
        if isinstance(event, WriteEvent):
            clauses[event.replica] = Write(clauses[event.replica], event.symbol)
            history[event.replica].append((event.step, clauses[event.replica]))
            applied += 1
        elif isinstance(event, GossipEvent):
            if _separated(scenario.partitions, event.src, event.dst, event.step):
                dropped.append(
                    DroppedGossip(event.step, event.src, event.dst, "partition")
                )
                continue
            payload = (
                clauses[event.src]
                if event.sent_at is None
                else snapshot(event.src, event.sent_at)
            )
            clauses[event.dst] = Merge(clauses[event.dst], payload)
            history[event.dst].append((event.step, clauses[event.dst]))
            applied += 1
        else:
            value = evaluator.query(clauses[event.replica])
            queries.append(
                QueryRecord(event.step, event.replica, value, adt.render_output(value))
            )
            applied += 1

    final_merges = 0
    if scenario.replicas > 1:
        for _ in range(scenario.gossip_rounds):
            for src in range(scenario.replicas):
                dst = (src + 1) % scenario.replicas
                clauses[dst] = Merge(clauses[dst], clauses[src])
                final_merges += 1

    states = tuple(evaluator.state(c) for c in clauses)
    outputs = tuple(adt.query(s) for s in states)
    converged = all(s == states[0] for s in states[1:])
    return TraceReport(
        scenario=scenario,
        final_clauses=tuple(clauses),
        final_states=states,
        final_state_texts=tuple(adt.render_state(s) for s in states),
        final_outputs=outputs,
        final_output_texts=tuple(adt.render_output(v) for v in outputs),
        queries=tuple(queries),
        dropped=tuple(dropped),
        applied_events=applied,
        final_merges=final_merges,
        converged=converged,
    )


# ---- partition consistency observations --------------------------------------


@dataclass(frozen=True)
class Observation:
    step: int
    replica: int
    output: str
    final_output: str
    consistent: bool

    def as_json(self):
        return {
            "step": self.step,
            "replica": self.replica,
            "output": self.output,
            "final_output": self.final_output,
            "consistent": self.consistent,
        }


@dataclass(frozen=True)
class ObservationReport:
    observations: tuple
    violations: int
    holds: bool

    def as_json(self):
        return {
            "observations": [o.as_json() for o in self.observations],
            "violations": self.violations,
            "holds": self.holds,
        }


def observe_partition_consistency(report, problem):
    """Mid-run query outputs must never contradict the same replica's
    final post-gossip output, under the problem's consistency order.
    The report's ADT must implement the given problem."""
    observations = []
    violations = 0
    for record in report.queries:
        final_value = report.final_outputs[record.replica]
        ok = problem.order_leq(record.value, final_value)
        if not ok:
            violations += 1
        observations.append(
            Observation(
                record.step,
                record.replica,
                record.text,
                report.final_output_texts[record.replica],
                ok,
            )
        )
    return ObservationReport(tuple(observations), violations, violations == 0)


# ---- seeded scenario generation ----------------------------------------------


def default_gossip_rounds(replicas):
    """Rounds guaranteeing full dissemination in the final ring phase."""
    if replicas <= 1:
        return 0
    return (replicas - 1).bit_length() + 1  # ceil(log2 R) + 1


def random_scenario(adt_name="gset", params=None, replicas=2, steps=8, seed=0):
    """Seeded schedule: distinct writes, then gossip/query filler, with an
    occasional partition window. Pure function of the seed stream."""
    params = dict(params or {})
    adt = build_adt(adt_name, **params)
    rng = SplitMix64(seed)
    symbols = sorted(adt.alphabet, key=symbol_key)

    n_writes = max(1, min(len(symbols), (2 * steps) // 5))
    steps = max(steps, n_writes)
    chosen = rng.shuffle(list(symbols))[:n_writes]
    slots = rng.shuffle(list(range(steps)))[:n_writes]
    write_slots = dict(zip(sorted(slots), chosen))

    events = []
    for slot in range(steps):
        step = slot + 1
        if slot in write_slots:
            events.append(WriteEvent(step, rng.bounded(replicas), write_slots[slot]))
        elif replicas >= 2 and rng.chance(7, 10):
            src = rng.bounded(replicas)
            dst = (src + 1 + rng.bounded(replicas - 1)) % replicas
            events.append(GossipEvent(step, src, dst))
        else:
            events.append(QueryEvent(step, rng.bounded(replicas)))

    partitions = ()
    if replicas >= 2 and rng.chance(1, 4):
        start = 1 + rng.bounded(steps)
        end = min(steps + 1, start + 1 + rng.bounded(steps))
        if end > start:
            partitions = (PartitionWindow(start, end, frozenset({rng.bounded(replicas)})),)

    return Scenario(
        adt=adt_name,
        params=params,
        replicas=replicas,
        events=tuple(events),
        partitions=partitions,
        seed=seed,
        gossip_rounds=default_gossip_rounds(replicas),
    )


# ---- DOT export ---------------------------------------------------------------


def render_dot(report):
    """Graphviz text: one timeline row per replica, writes and merges as
    boxes, gossip as dashed cross-row arrows from the payload snapshot."""
    scenario = report.scenario
    lines = [
        "digraph trace {",
        "  rankdir=LR;",
        '  node [shape=box, fontname="Helvetica"];',
        '  edge [fontname="Helvetica"];',
    ]
    node_history = {r: [(0, f"r{r}_s0")] for r in range(scenario.replicas)}

    def node_at(replica, step):
        for past_step, node in reversed(node_history[replica]):
            if past_step <= step:
                return node
        return f"r{replica}_s0"

    rows = {r: [f"r{r}_s0"] for r in range(scenario.replicas)}
    labels = {f"r{r}_s0": "s0" for r in range(scenario.replicas)}
    cross = []
    dropped_steps = {(d.step, d.src, d.dst) for d in report.dropped}

    for event in scenario.events:
        if isinstance(event, WriteEvent):
            nid = f"r{event.replica}_{event.step}"
            labels[nid] = f"W {event.symbol}"
            rows[event.replica].append(nid)
            node_history[event.replica].append((event.step, nid))
        elif isinstance(event, GossipEvent):
            if (event.step, event.src, event.dst) in dropped_steps:
                continue
            nid = f"r{event.dst}_{event.step}"
            labels[nid] = "M"
            rows[event.dst].append(nid)
            origin_step = event.sent_at if event.sent_at is not None else event.step
            cross.append((node_at(event.src, origin_step), nid))
            node_history[event.dst].append((event.step, nid))
        else:
            nid = f"r{event.replica}_{event.step}"
            output = next(
                (q.text for q in report.queries
                 if q.step == event.step and q.replica == event.replica),
                "",
            )
            labels[nid] = f"Q = {output}"
            rows[event.replica].append(nid)
            node_history[event.replica].append((event.step, nid))

    step = max((e.step for e in scenario.events), default=0)
    for merge_index in range(report.final_merges):
        src = merge_index % scenario.replicas
        dst = (src + 1) % scenario.replicas
        step += 1
        nid = f"r{dst}_{step}"
        labels[nid] = "M final"
        cross.append((node_at(src, step), nid))
        rows[dst].append(nid)
        node_history[dst].append((step, nid))

    for r in range(scenario.replicas):
        lines.append(f"  subgraph cluster_r{r} {{")
        lines.append(f'    label="replica {r}";')
        lines.append("    style=rounded;")
        for nid in rows[r]:
            lines.append(f'    {nid} [label="{labels[nid]}"];')
        for a, b in zip(rows[r], rows[r][1:]):
            lines.append(f"    {a} -> {b};")
        lines.append("  }")
    for a, b in cross:
        lines.append(f"  {a} -> {b} [style=dashed, constraint=false];")
    lines.append("}")
    return "\n".join(lines) + "\n"
