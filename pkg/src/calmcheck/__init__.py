"""Verification toolkit for coordination-free replicated computation.

Execution histories are clauses over a write/merge algebra; checkers
decide, exhaustively up to a size bound, whether a replicated ADT is
strongly eventually consistent, whether an implementation is confluent
and consistent under partition, and whether a query problem is
monotone. A deterministic simulator replays multi-replica schedules
with crossing gossip and partition windows.
"""

from .adt import (
    AbstractDataType,
    AdtError,
    MemoizedEvaluator,
    MergeUnavailableError,
    UnknownSymbolError,
    as_object,
    evaluate,
    memoized_evaluator,
    query_of,
)
from .catalog import (
    ADT_NAMES,
    PROBLEM_NAMES,
    build_adt,
    build_problem,
    constant_problem,
    cycle_edges,
    deadlock_adt,
    deadlock_problem,
    edge_token,
    gc_adt,
    gc_problem,
    gset_adt,
    max_register_adt,
    reachable_nodes,
    reachable_set_problem,
    sum_counter_adt,
    unreachable_nodes,
)
from .clauses import (
    INITIAL,
    BudgetError,
    Clause,
    ClauseParseError,
    ClauseSet,
    Initial,
    Merge,
    Write,
    clause_leq,
    count_clauses,
    enumerate_clauses,
    input_set,
    is_local,
    parse,
    partitions,
    random_clause,
    render,
    size,
)
from .coordination import (
    Bounds,
    CalmReport,
    CfVerdict,
    CoordinationFunction,
    Implementation,
    calm_cross_check,
    check_coordination_free,
    check_confluence,
    check_partition_consistency,
    check_validity,
)
from .problems import (
    Problem,
    TotalInputSpace,
    canonical_implementation,
    check_consistency_order,
    check_monotone,
    enumerate_space,
    full_space,
    query_domain_note,
)
from .rng import SplitMix64
from .sec import SecVerdict, check_laws, check_sec_definition, normalize
from .simulator import (
    GossipEvent,
    PartitionWindow,
    QueryEvent,
    Scenario,
    ScenarioError,
    TraceReport,
    WriteEvent,
    default_gossip_rounds,
    load_scenario,
    observe_partition_consistency,
    random_scenario,
    render_dot,
    run,
    scenario_from_json,
    validate_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "ADT_NAMES",
    "AbstractDataType",
    "AdtError",
    "Bounds",
    "BudgetError",
    "CalmReport",
    "CfVerdict",
    "Clause",
    "ClauseParseError",
    "ClauseSet",
    "CoordinationFunction",
    "GossipEvent",
    "INITIAL",
    "Implementation",
    "Initial",
    "MemoizedEvaluator",
    "Merge",
    "MergeUnavailableError",
    "PROBLEM_NAMES",
    "PartitionWindow",
    "Problem",
    "QueryEvent",
    "Scenario",
    "ScenarioError",
    "SecVerdict",
    "SplitMix64",
    "TotalInputSpace",
    "TraceReport",
    "UnknownSymbolError",
    "Write",
    "WriteEvent",
    "as_object",
    "build_adt",
    "build_problem",
    "calm_cross_check",
    "canonical_implementation",
    "check_confluence",
    "check_consistency_order",
    "check_coordination_free",
    "check_laws",
    "check_monotone",
    "check_partition_consistency",
    "check_sec_definition",
    "check_validity",
    "clause_leq",
    "constant_problem",
    "count_clauses",
    "cycle_edges",
    "deadlock_adt",
    "deadlock_problem",
    "default_gossip_rounds",
    "edge_token",
    "enumerate_clauses",
    "enumerate_space",
    "evaluate",
    "full_space",
    "gc_adt",
    "gc_problem",
    "gset_adt",
    "input_set",
    "is_local",
    "load_scenario",
    "max_register_adt",
    "memoized_evaluator",
    "normalize",
    "observe_partition_consistency",
    "parse",
    "partitions",
    "query_domain_note",
    "query_of",
    "random_clause",
    "random_scenario",
    "reachable_nodes",
    "reachable_set_problem",
    "render",
    "render_dot",
    "run",
    "scenario_from_json",
    "size",
    "sum_counter_adt",
    "unreachable_nodes",
    "validate_scenario",
    "__version__",
]
