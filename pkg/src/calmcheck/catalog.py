"""Built-in ADTs and problems used as fixtures by every checker.

ADTs (registry names in brackets):
 - [gset] grow-only set: insert/union, the simplest lattice
 - [sum-counter] integer addition for write and merge; deliberately
   breaks idempotence, the stock SEC counterexample
 - [max-register] max for write and merge; a non-set lattice
 - [deadlock] wait-for edge sets; query extracts edges lying on a cycle
 - [gc] reference edge sets; query reports nodes unreachable from the
   root (the collectible ones)

Problems: [deadlock] and [gc] as above, [reachable-set] (nodes reachable
from the root, the monotone cousin of gc), and [constant]. Graph inputs
are encoded as edge tokens "u_v" over a declared node universe; gc and
reachable-set use nodes 0..n-1 with root 0, deadlock uses nodes 1..n.
For gc, a legal total input must register every node via its self-loop
edge (n, n), so the legality predicate is "all self-loops present".
"""

from .adt import AbstractDataType
from .clauses import symbol_key
from .problems import Problem, TotalInputSpace, full_space

_LETTERS = "abcdefghijklmnopqrstuvwxyz"


# ---- token helpers ----------------------------------------------------------


def edge_token(u, v):
    return f"{u}_{v}"


def parse_edge(token):
    u, v = token.split("_")
    return (int(u), int(v))


def edge_alphabet(nodes):
    return tuple(edge_token(u, v) for u in nodes for v in nodes)


def render_edge_set(edges):
    return "{" + ", ".join(f"({u},{v})" for u, v in sorted(edges)) + "}"


def render_node_set(nodes):
    return "{" + ", ".join(str(n) for n in sorted(nodes)) + "}"


def _parse_edges(tokens):
    return frozenset(parse_edge(t) for t in tokens)


# ---- graph queries (the product implementations; tests hold the oracles) ----


def _reaches(edges, src, dst):
    """BFS over the edge set; every node reaches itself."""
    if src == dst:
        return True
    adjacency = {}
    for u, v in edges:
        adjacency.setdefault(u, []).append(v)
    seen = {src}
    frontier = [src]
    while frontier:
        node = frontier.pop()
        for nxt in adjacency.get(node, ()):
            if nxt == dst:
                return True
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return False


def cycle_edges(edges):
    """Edges lying on a directed cycle: (u, v) such that v reaches u."""
    return frozenset(e for e in edges if _reaches(edges, e[1], e[0]))


def reachable_nodes(edges, root):
    seen = {root}
    frontier = [root]
    adjacency = {}
    for u, v in edges:
        adjacency.setdefault(u, []).append(v)
    while frontier:
        node = frontier.pop()
        for nxt in adjacency.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return frozenset(seen)


def unreachable_nodes(edges, nodes, root):
    return frozenset(nodes) - reachable_nodes(edges, root)


# ---- replicated ADTs --------------------------------------------------------


def gset_adt(symbols=("a", "b")):
    """Grow-only set; query is the state itself."""
    return AbstractDataType(
        name="gset",
        alphabet=frozenset(symbols),
        initial=frozenset(),
        write=lambda s, i: s | {i},
        query=lambda s: s,
        merge=lambda a, b: a | b,
        render_state=_render_token_set,
        render_output=_render_token_set,
    )


def _render_token_set(tokens):
    return "{" + ", ".join(sorted(tokens, key=symbol_key)) + "}"


def _int_tokens(count):
    return tuple(str(k) for k in range(1, count + 1))


def sum_counter_adt(alphabet_size=2):
    """Adds the written token on write and the states on merge.

    Addition is associative and commutative but not idempotent, so this
    fixture fails SEC with small witnesses.
    """
    return AbstractDataType(
        name="sum-counter",
        alphabet=frozenset(_int_tokens(alphabet_size)),
        initial=0,
        write=lambda s, i: s + int(i),
        query=lambda s: s,
        merge=lambda a, b: a + b,
        render_state=str,
        render_output=str,
    )


def max_register_adt(alphabet_size=2):
    """Keeps the largest token seen; max is a lattice join."""
    return AbstractDataType(
        name="max-register",
        alphabet=frozenset(_int_tokens(alphabet_size)),
        initial=0,
        write=lambda s, i: max(s, int(i)),
        query=lambda s: s,
        merge=max,
        render_state=str,
        render_output=str,
    )


def _edge_set_adt(name, nodes, query):
    return AbstractDataType(
        name=name,
        alphabet=frozenset(edge_alphabet(nodes)),
        initial=frozenset(),
        write=lambda s, i: s | {parse_edge(i)},
        query=query,
        merge=lambda a, b: a | b,
        render_state=render_edge_set,
        render_output=render_node_set if name == "gc" else render_edge_set,
    )


def deadlock_adt(node_count=2):
    """Wait-for graph accumulator over nodes 1..n; query = cycle edges."""
    nodes = tuple(range(1, node_count + 1))
    return _edge_set_adt("deadlock", nodes, cycle_edges)


def gc_adt(node_count=2, root=0):
    """Reference graph accumulator over nodes 0..n-1; query = collectible nodes."""
    nodes = tuple(range(node_count))
    return _edge_set_adt(
        "gc", nodes, lambda s: unreachable_nodes(s, nodes, root)
    )


# ---- problems ---------------------------------------------------------------


def deadlock_problem(node_count=2):
    """Edges on a cycle, over any subset of the edge alphabet; order is subset."""
    nodes = tuple(range(1, node_count + 1))
    return Problem(
        name="deadlock",
        space=full_space(edge_alphabet(nodes)),
        apply=lambda x: cycle_edges(_parse_edges(x)),
        order_leq=lambda a, b: a <= b,
        render_output=render_edge_set,
    )


def gc_problem(node_count=2, root=0):
    """Collectible (root-unreachable) nodes; legal inputs register every node.

    A node registers itself by contributing its self-loop edge, so the
    legal total inputs are exactly the edge sets containing (n, n) for
    each declared node. The function itself stays total on all subsets.
    """
    nodes = tuple(range(node_count))
    required = frozenset(edge_token(n, n) for n in nodes)
    space = TotalInputSpace(
        alphabet=tuple(sorted(edge_alphabet(nodes), key=symbol_key)),
        legal=lambda x: required <= x,
        description="every declared node must appear via its self-loop edge (n, n)",
    )
    return Problem(
        name="gc",
        space=space,
        apply=lambda x: unreachable_nodes(_parse_edges(x), nodes, root),
        order_leq=lambda a, b: a <= b,
        render_output=render_node_set,
    )


def reachable_set_problem(node_count=2, root=0):
    """Nodes reachable from the root; monotone counterpart of gc."""
    nodes = tuple(range(node_count))
    return Problem(
        name="reachable-set",
        space=full_space(edge_alphabet(nodes)),
        apply=lambda x: reachable_nodes(_parse_edges(x), root) & frozenset(nodes),
        order_leq=lambda a, b: a <= b,
        render_output=render_node_set,
    )


def constant_problem(alphabet_size=2):
    """Ignores its input entirely; trivially monotone."""
    return Problem(
        name="constant",
        space=full_space(_LETTERS[:alphabet_size]),
        apply=lambda x: frozenset(),
        order_leq=lambda a, b: a <= b,
        render_output=render_node_set,
    )


def sequenced_input_space(max_index=2, value_count=2):
    """Legality fixture: inputs are (index, value) pairs "k_y" and a legal
    total input is the graph of a function defined on a prefix 0..n of
    the indices. The empty set is illegal (every prefix contains 0) and
    so is any set assigning two values to one index.
    """
    tokens = tuple(
        edge_token(k, y) for k in range(max_index + 1) for y in range(value_count)
    )

    def legal(x):
        if not x:
            return False
        pairs = [parse_edge(t) for t in x]
        indices = [k for k, _ in pairs]
        if len(set(indices)) != len(indices):
            return False
        return set(indices) == set(range(max(indices) + 1))

    return TotalInputSpace(
        alphabet=tuple(sorted(tokens, key=symbol_key)),
        legal=legal,
        description="must be the graph of a function on indices 0..n",
    )


# ---- registries -------------------------------------------------------------

ADT_NAMES = ("gset", "sum-counter", "max-register", "deadlock", "gc")
PROBLEM_NAMES = ("deadlock", "gc", "reachable-set", "constant")


def build_adt(name, alphabet_size=None, nodes=None, symbols=None):
    """Construct a registered ADT from CLI/scenario parameters."""
    if name == "gset":
        if symbols:
            return gset_adt(tuple(symbols))
        size = alphabet_size or 2
        if size > len(_LETTERS):
            raise ValueError(f"gset alphabet_size is capped at {len(_LETTERS)}")
        return gset_adt(tuple(_LETTERS[:size]))
    if name == "sum-counter":
        return sum_counter_adt(alphabet_size or 2)
    if name == "max-register":
        return max_register_adt(alphabet_size or 2)
    if name == "deadlock":
        return deadlock_adt(nodes or 2)
    if name == "gc":
        return gc_adt(nodes or 2)
    raise ValueError(f"unknown ADT {name!r}; registered: {', '.join(ADT_NAMES)}")


def build_problem(name, nodes=None, alphabet_size=None):
    """Construct a registered problem from CLI parameters."""
    if name == "deadlock":
        return deadlock_problem(nodes or 2)
    if name == "gc":
        return gc_problem(nodes or 2)
    if name == "reachable-set":
        return reachable_set_problem(nodes or 2)
    if name == "constant":
        return constant_problem(alphabet_size or 2)
    raise ValueError(
        f"unknown problem {name!r}; registered: {', '.join(PROBLEM_NAMES)}"
    )
