"""Abstract data types (write, query, merge, initial state) and clause evaluation.

States are opaque to this module: an ADT brings its own state values,
equality (plain ==), and canonical text rendering. Evaluation folds a
clause bottom-up: Initial maps to s0, Write applies the write function,
Merge applies the merge function. An ADT without a merge function is a
plain (non-replicated) object and can only evaluate local clauses.
"""

from dataclasses import dataclass, field, replace
from typing import Any, Callable, Optional

from .clauses import Clause, Initial, Merge, Write


class AdtError(Exception):
    pass


class UnknownSymbolError(AdtError):
    def __init__(self, symbol, adt_name):
        super().__init__(f"symbol {symbol!r} is not in the alphabet of ADT {adt_name!r}")
        self.symbol = symbol


class MergeUnavailableError(AdtError):
    def __init__(self, adt_name):
        super().__init__(
            f"ADT {adt_name!r} has no merge function; only local clauses can be evaluated"
        )


@dataclass(frozen=True)
class AbstractDataType:
    """The tuple (write, query, merge, s0) over a declared alphabet.

    merge=None makes this a plain object rather than a replicated one.
    All supplied functions must be pure.
    """

    name: str
    alphabet: frozenset
    initial: Any
    write: Callable[[Any, str], Any]
    query: Callable[[Any], Any]
    merge: Optional[Callable[[Any, Any], Any]] = None
    render_state: Callable[[Any], str] = field(default=repr)
    render_output: Callable[[Any], str] = field(default=repr)

    @property
    def replicated(self):
        return self.merge is not None


def as_object(adt):
    """Drop the merge function, leaving a plain single-instance object."""
    return replace(adt, merge=None)


_MISSING = object()


def _fold(adt, clause, cache):
    """Shared evaluation loop; cache maps already-evaluated clauses to states."""
    stack = [clause]
    while stack:
        node = stack[-1]
        if node in cache:
            stack.pop()
            continue
        kind = type(node)
        if kind is Initial:
            cache[node] = adt.initial
            stack.pop()
        elif kind is Write:
            if node.symbol not in adt.alphabet:
                raise UnknownSymbolError(node.symbol, adt.name)
            inner = cache.get(node.inner, _MISSING)
            if inner is _MISSING:
                stack.append(node.inner)
            else:
                cache[node] = adt.write(inner, node.symbol)
                stack.pop()
        else:
            if adt.merge is None:
                raise MergeUnavailableError(adt.name)
            left = cache.get(node.left, _MISSING)
            right = cache.get(node.right, _MISSING)
            if left is _MISSING or right is _MISSING:
                if right is _MISSING:
                    stack.append(node.right)
                if left is _MISSING:
                    stack.append(node.left)
            else:
                cache[node] = adt.merge(left, right)
                stack.pop()
    return cache[clause]


def evaluate(adt, clause):
    """State reached by the clause; fresh cache per call."""
    return _fold(adt, clause, {})


def query_of(adt, clause):
    """Query output of the state reached by the clause."""
    return adt.query(evaluate(adt, clause))


class MemoizedEvaluator:
    """Evaluator that keeps per-subclause states across calls.

    Observationally identical to evaluate(); worthwhile when many
    clauses share structure (enumeration layers, gossip histories).
    """

    def __init__(self, adt):
        self.adt = adt
        self._states = {}

    def state(self, clause):
        return _fold(self.adt, clause, self._states)

    def query(self, clause):
        return self.adt.query(self.state(clause))


def memoized_evaluator(adt):
    return MemoizedEvaluator(adt)
