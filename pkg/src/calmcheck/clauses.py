"""Execution traces as expression trees over writes and merges.

A clause records how a replica's state came to be: it is either the
initial state s0, a write of one input symbol on top of an earlier
clause, or a merge of two clauses. Clauses are immutable and compared
structurally; what a clause *evaluates to* is the business of an ADT
(see adt.py), not of this module.

The module also provides the partition order on clauses (c0 is below c
when c extends c0 by writes and merges, which works out to "c0 is a
subterm of c"), bounded exhaustive enumeration, a seeded random
generator, and the textual syntax:

    clause := item { "W" TOKEN | "M" item }*        (left associative)
    item   := "s0" | "(" clause ")"
    TOKEN  := [A-Za-z0-9_]+ except the reserved words s0, W, M

All operations are iterative so that deep or heavily shared trees from
long simulations do not hit the recursion limit.
"""

import os

DEFAULT_BUDGET = 500_000
BUDGET_ENV_VAR = "CALMCHECK_BUDGET"

_RESERVED = ("s0", "W", "M")


class ClauseParseError(ValueError):
    """Raised when clause text does not follow the grammar."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class BudgetError(RuntimeError):
    """Raised when an enumeration would exceed its configured budget."""

    def __init__(self, what, requested, bound):
        super().__init__(
            f"{what}: {requested} items requested, budget is {bound} "
            f"(override with the {BUDGET_ENV_VAR} environment variable or an explicit bound)"
        )
        self.requested = requested
        self.bound = bound


def symbol_key(symbol):
    """Total order on input symbols: length first, then lexicographic.

    Keeps numeric tokens in value order ("2" before "10") and edge
    tokens in row-major order.
    """
    return (len(symbol), symbol)


class Clause:
    """Base class; instances are Initial, Write, or Merge nodes."""

    __slots__ = ("size", "inputs", "local", "_hash")

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Clause):
            return NotImplemented
        # iterative structural comparison; the seen set keeps shared
        # subtrees from being re-walked exponentially
        stack = [(self, other)]
        seen = set()
        while stack:
            a, b = stack.pop()
            if a is b:
                continue
            if type(a) is not type(b) or a._hash != b._hash or a.size != b.size:
                return False
            key = (id(a), id(b))
            if key in seen:
                continue
            seen.add(key)
            if type(a) is Write:
                if a.symbol != b.symbol:
                    return False
                stack.append((a.inner, b.inner))
            elif type(a) is Merge:
                stack.append((a.left, b.left))
                stack.append((a.right, b.right))
        return True

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __repr__(self):
        if self.size <= 40:
            return f"<clause {render(self)}>"
        return f"<clause of size {self.size}>"


class Initial(Clause):
    """The clause denoting s0."""

    __slots__ = ()

    def __init__(self):
        self.size = 1
        self.inputs = frozenset()
        self.local = True
        self._hash = hash(("clause", 0))


class Write(Clause):
    """One input symbol applied on top of an earlier clause."""

    __slots__ = ("inner", "symbol")

    def __init__(self, inner, symbol):
        self.inner = inner
        self.symbol = symbol
        self.size = inner.size + 1
        self.inputs = inner.inputs | {symbol}
        self.local = inner.local
        self._hash = hash(("clause", 1, symbol, inner._hash))


class Merge(Clause):
    """Two clauses joined; evaluation applies the ADT's merge."""

    __slots__ = ("left", "right")

    def __init__(self, left, right):
        self.left = left
        self.right = right
        self.size = left.size + right.size + 1
        self.inputs = left.inputs | right.inputs
        self.local = False
        self._hash = hash(("clause", 2, left._hash, right._hash))


INITIAL = Initial()


def input_set(clause):
    """Distinct symbols written anywhere in the clause."""
    return clause.inputs


def is_local(clause):
    """True iff the clause contains no merge node."""
    return clause.local


def size(clause):
    """Tree size: nodes counted with multiplicity, Initial counts 1."""
    return clause.size


def structure_key(clause):
    """Deterministic sort key: preorder serialization as a string tuple.

    Alphabet independent, consistent with symbol_key on write tokens.
    """
    parts = []
    stack = [clause]
    while stack:
        node = stack.pop()
        if type(node) is Initial:
            parts.append("I")
        elif type(node) is Write:
            parts.append("W")
            parts.append(f"{len(node.symbol):04d}{node.symbol}")
            stack.append(node.inner)
        else:
            parts.append("M")
            stack.append(node.right)
            stack.append(node.left)
    return tuple(parts)


def clause_sort_key(clause):
    return (clause.size, structure_key(clause))


def partitions(clause):
    """All clauses below the argument in the partition order.

    The order is generated by reflexivity, c -> c W i, c -> c M d,
    c -> d M c, and transitivity; closing those rules downward yields
    exactly the subterm set, including the clause itself.
    """
    out = set()
    stack = [clause]
    while stack:
        node = stack.pop()
        if node in out:
            continue
        out.add(node)
        if type(node) is Write:
            stack.append(node.inner)
        elif type(node) is Merge:
            stack.append(node.left)
            stack.append(node.right)
    return frozenset(out)


def clause_leq(c1, c2):
    """True iff c1 is below c2 in the partition order."""
    if c1.size > c2.size:
        return False
    stack = [c2]
    seen = set()
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if node.size < c1.size:
            continue
        if node == c1:
            return True
        if type(node) is Write:
            stack.append(node.inner)
        elif type(node) is Merge:
            stack.append(node.left)
            stack.append(node.right)
    return False


class ClauseSet:
    """Finite deduplicated clause universe with its generation bound."""

    def __init__(self, alphabet, max_size, clauses):
        self.alphabet = tuple(sorted(alphabet, key=symbol_key))
        self.max_size = max_size
        self.clauses = tuple(clauses)
        self._members = frozenset(self.clauses)

    def __iter__(self):
        return iter(self.clauses)

    def __len__(self):
        return len(self.clauses)

    def __contains__(self, clause):
        return clause in self._members

    def __repr__(self):
        return (
            f"<ClauseSet |alphabet|={len(self.alphabet)} "
            f"max_size={self.max_size} n={len(self.clauses)}>"
        )


def count_clauses(alphabet_size, max_size):
    """Number of distinct clauses with tree size <= max_size.

    T(1)=1 and T(n) = |alphabet|*T(n-1) + sum(T(a)*T(b), a+b=n-1);
    used to check the generation budget before building anything.
    """
    if max_size < 1:
        return 0
    t = [0] * (max_size + 1)
    t[1] = 1
    for n in range(2, max_size + 1):
        total = alphabet_size * t[n - 1]
        for a in range(1, n - 1):
            total += t[a] * t[n - 1 - a]
        t[n] = total
    return sum(t[1:])


def resolve_budget(budget=None):
    if budget is not None:
        return budget
    raw = os.environ.get(BUDGET_ENV_VAR)
    return int(raw) if raw else DEFAULT_BUDGET


def enumerate_clauses(alphabet, max_size, budget=None):
    """Every structurally distinct clause over the alphabet, size <= max_size.

    Order is canonical: size first, then preorder structure. Raises
    BudgetError if the count would exceed the budget.
    """
    if max_size < 1:
        raise ValueError(f"max_size must be >= 1, got {max_size}")
    symbols = sorted(set(alphabet), key=symbol_key)
    expected = count_clauses(len(symbols), max_size)
    bound = resolve_budget(budget)
    if expected > bound:
        raise BudgetError("clause enumeration", expected, bound)

    by_size = {1: [INITIAL]}
    for n in range(2, max_size + 1):
        layer = []
        for inner in by_size[n - 1]:
            for sym in symbols:
                layer.append(Write(inner, sym))
        for left_size in range(1, n - 1):
            right_size = n - 1 - left_size
            for left in by_size[left_size]:
                for right in by_size[right_size]:
                    layer.append(Merge(left, right))
        layer.sort(key=structure_key)
        by_size[n] = layer

    ordered = []
    for n in range(1, max_size + 1):
        ordered.extend(by_size.get(n, ()))
    return ClauseSet(symbols, max_size, ordered)


def random_clause(symbols, max_size, rng):
    """Seeded random clause of size between 1 and max_size.

    Pure function of the rng stream; used by the randomized law
    supplement in sec.py.
    """
    symbols = sorted(set(symbols), key=symbol_key)

    def build(target):
        # target sizes stay small (tens), recursion depth is bounded by it
        if target <= 1:
            return INITIAL
        if target == 2:
            # a size-2 clause is necessarily a single write
            if not symbols:
                return INITIAL
            return Write(INITIAL, symbols[rng.bounded(len(symbols))])
        if not symbols or (target >= 3 and rng.bounded(2) == 1):
            left_size = 1 + rng.bounded(target - 2)
            return Merge(build(left_size), build(target - 1 - left_size))
        return Write(build(target - 1), symbols[rng.bounded(len(symbols))])

    target = 1 + rng.bounded(max_size)
    return build(target)


def render(clause):
    """Infix text with minimal parentheses; parse(render(c)) == c.

    Operators are left associative with equal precedence, so only a
    merge's right operand ever needs parentheses for correctness; a
    write operand on the left of a merge is parenthesized for
    readability.
    """
    parts = []
    stack = [(clause, "root")]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            parts.append(item)
            continue
        node, role = item
        kind = type(node)
        paren = (role == "mleft" and kind is Write) or (
            role == "mright" and kind is not Initial
        )
        if paren:
            parts.append("(")
            stack.append(")")
        if kind is Initial:
            # the close paren marker, if any, was just pushed; emit now
            parts.append("s0")
            if paren:
                parts.append(stack.pop())
        elif kind is Write:
            stack.append(f" W {node.symbol}")
            stack.append((node.inner, "winner"))
        else:
            stack.append((node.right, "mright"))
            stack.append(" M ")
            stack.append((node.left, "mleft"))
    return "".join(parts)


def _tokenize(text):
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "()":
            tokens.append((ch, i))
            i += 1
            continue
        if ch.isalnum() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append((text[i:j], i))
            i = j
            continue
        raise ClauseParseError(f"unexpected character {ch!r}", i)
    return tokens


def parse(text):
    """Parse the textual clause syntax back into a Clause."""
    tokens = _tokenize(text)
    frames = []  # (accumulated clause, pending operator) outside each open paren
    acc = None
    op = None

    def take_item(item, pos):
        nonlocal acc, op
        if acc is None:
            acc = item
        elif op == "M":
            acc = Merge(acc, item)
            op = None
        elif op == "W":
            raise ClauseParseError("W expects a bare token, not a clause", pos)
        else:
            raise ClauseParseError("missing operator before operand", pos)

    for word, pos in tokens:
        if word == "(":
            if acc is not None and op is None:
                raise ClauseParseError("missing operator before '('", pos)
            frames.append((acc, op))
            acc, op = None, None
        elif word == ")":
            if not frames:
                raise ClauseParseError("unbalanced ')'", pos)
            if acc is None:
                raise ClauseParseError("empty parentheses", pos)
            if op is not None:
                raise ClauseParseError(f"dangling {op} before ')'", pos)
            inner = acc
            acc, op = frames.pop()
            take_item(inner, pos)
        elif word == "s0":
            take_item(INITIAL, pos)
        elif word in ("W", "M"):
            if acc is None:
                raise ClauseParseError(f"{word} needs a left operand", pos)
            if op is not None:
                raise ClauseParseError(f"two operators in a row at {word}", pos)
            op = word
        else:
            if op == "W":
                acc = Write(acc, word)
                op = None
            elif op == "M":
                raise ClauseParseError(
                    f"M expects s0 or a parenthesized clause, got {word!r}", pos
                )
            else:
                raise ClauseParseError(f"unexpected token {word!r}", pos)
    if frames:
        raise ClauseParseError("unbalanced '('", len(text))
    if op is not None:
        raise ClauseParseError(f"dangling operator {op}", len(text))
    if acc is None:
        raise ClauseParseError("empty input", 0)
    return acc
