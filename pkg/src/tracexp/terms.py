"""Core term model: values, substitutions, event-type patterns, and
hash-consed trace-expression graphs.

Values are plain JSON-shaped Python data (None, bool, int/float, str,
list, dict).  Trace expressions are interned nodes of a finite cyclic
graph; every cycle runs through an equation :class:`Cell`, so the node
structure itself is acyclic and can be hash-consed bottom-up.
"""

from __future__ import annotations

import threading
from typing import Any, Iterator, Mapping, Optional

Value = Any


def value_eq(a: Value, b: Value) -> bool:
    """Deep structural equality of wire values.

    Numbers compare by numeric value (9 equals 9.0); booleans are a
    separate kind and never equal numbers; maps compare by identical
    key sets and equal values; sequences compare element-wise.
    """
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a == b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return a == b
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    if a is None or b is None:
        return a is None and b is None
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(value_eq(x, y) for x, y in zip(a, b))
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(value_eq(v, b[k]) for k, v in a.items())
    return False


def value_key(v: Value) -> tuple:
    """Hashable canonical form of a value, consistent with value_eq."""
    if isinstance(v, bool):
        return ("b", v)
    if isinstance(v, (int, float)):
        # hash(9) == hash(9.0) in Python, matching numeric-value equality
        return ("n", v)
    if isinstance(v, str):
        return ("s", v)
    if v is None:
        return ("z",)
    if isinstance(v, list):
        return ("l", tuple(value_key(x) for x in v))
    if isinstance(v, dict):
        return ("m", tuple(sorted((k, value_key(x)) for k, x in v.items())))
    raise TypeError(f"not a wire value: {type(v).__name__}")


class Subst(Mapping[str, Value]):
    """Immutable finite map from variable names to values.

    Lookup of an unbound name raises KeyError; use ``name in s`` to
    test membership.  Hashable, so results can key dedup tables.
    """

    __slots__ = ("_bound", "_key")

    def __init__(self, bound: Mapping[str, Value] | None = None):
        b = dict(bound) if bound else {}
        self._bound = b
        self._key = tuple(sorted((n, value_key(v)) for n, v in b.items()))

    def __getitem__(self, name: str) -> Value:
        return self._bound[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._bound)

    def __len__(self) -> int:
        return len(self._bound)

    def __contains__(self, name: object) -> bool:
        return name in self._bound

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Subst) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}={v!r}" for n, v in sorted(self._bound.items()))
        return f"{{{inner}}}"

    @property
    def is_empty(self) -> bool:
        return not self._bound

    @property
    def cache_key(self) -> tuple:
        return self._key

    def merge(self, other: "Subst") -> Optional["Subst"]:
        """Union of two substitutions, or None when they disagree on a
        shared variable (the intersection rule is then inapplicable)."""
        for n, v in other._bound.items():
            if n in self._bound and not value_eq(self._bound[n], v):
                return None
        if not other._bound:
            return self
        if not self._bound:
            return other
        merged = dict(self._bound)
        merged.update(other._bound)
        return Subst(merged)

    def without(self, name: str) -> "Subst":
        """Copy with `name` removed from the domain."""
        if name not in self._bound:
            return self
        rest = dict(self._bound)
        del rest[name]
        return Subst(rest)

    def restrict(self, names) -> "Subst":
        """Copy keeping only the bindings whose name is in `names`."""
        if all(n in names for n in self._bound):
            return self
        return Subst({n: v for n, v in self._bound.items() if n in names})


EMPTY_SUBST = Subst()


# ---------------------------------------------------------------------------
# Patterns and event types

class Pattern:
    __slots__ = ()


class Wild(Pattern):
    """Matches any value (and tolerates an absent field)."""

    __slots__ = ()

    def __eq__(self, other):
        return isinstance(other, Wild)

    def __hash__(self):
        return hash(Wild)

    def __repr__(self):
        return "_"


WILD = Wild()


class Lit(Pattern):
    """Matches exactly one value under value_eq."""

    __slots__ = ("value", "_key")

    def __init__(self, value: Value):
        self.value = value
        self._key = value_key(value)

    def __eq__(self, other):
        return isinstance(other, Lit) and self._key == other._key

    def __hash__(self):
        return hash(("lit", self._key))

    def __repr__(self):
        return repr(self.value)


class Var(Pattern):
    """Binds the matched value to a variable name."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def __eq__(self, other):
        return isinstance(other, Var) and self.name == other.name

    def __hash__(self):
        return hash(("var", self.name))

    def __repr__(self):
        return self.name


class Seq(Pattern):
    """List pattern; an optional tail pattern takes the remainder, so
    the list must be at least as long as the explicit items."""

    __slots__ = ("items", "tail")

    def __init__(self, items, tail: Pattern | None = None):
        self.items = tuple(items)
        self.tail = tail

    def __eq__(self, other):
        return (
            isinstance(other, Seq)
            and self.items == other.items
            and self.tail == other.tail
        )

    def __hash__(self):
        return hash(("seq", self.items, self.tail))

    def __repr__(self):
        inner = ", ".join(map(repr, self.items))
        if self.tail is not None:
            inner += f" | {self.tail!r}"
        return f"[{inner}]"


class Ctor(Pattern):
    """Named term pattern.  No wire value has this shape, so as an
    argument pattern it never matches; it exists so typed terms can be
    represented uniformly."""

    __slots__ = ("name", "args")

    def __init__(self, name: str, args=()):
        self.name = name
        self.args = tuple(args)

    def __eq__(self, other):
        return isinstance(other, Ctor) and self.name == other.name and self.args == other.args

    def __hash__(self):
        return hash(("ctor", self.name, self.args))

    def __repr__(self):
        return f"{self.name}({', '.join(map(repr, self.args))})"


class EventType:
    """A named pattern term matched against events by the active domain."""

    __slots__ = ("head", "args", "_hash")

    def __init__(self, head: str, args=()):
        self.head = head
        self.args = tuple(args)
        self._hash = hash((head, self.args))

    @property
    def arity(self) -> int:
        return len(self.args)

    def __eq__(self, other):
        return isinstance(other, EventType) and self.head == other.head and self.args == other.args

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if not self.args:
            return self.head
        return f"{self.head}({', '.join(map(repr, self.args))})"


def _pattern_vars(p: Pattern, acc: set) -> None:
    if isinstance(p, Var):
        acc.add(p.name)
    elif isinstance(p, Seq):
        for item in p.items:
            _pattern_vars(item, acc)
        if p.tail is not None:
            _pattern_vars(p.tail, acc)
    elif isinstance(p, Ctor):
        for a in p.args:
            _pattern_vars(a, acc)


def vars_of(t: EventType) -> frozenset[str]:
    """The variables syntactically occurring in t's argument patterns."""
    acc: set[str] = set()
    for a in t.args:
        _pattern_vars(a, acc)
    return frozenset(acc)


def _subst_pattern(s: Subst, p: Pattern) -> Pattern:
    if isinstance(p, Var):
        return Lit(s[p.name]) if p.name in s else p
    if isinstance(p, Seq):
        items = tuple(_subst_pattern(s, it) for it in p.items)
        tail = _subst_pattern(s, p.tail) if p.tail is not None else None
        return Seq(items, tail)
    if isinstance(p, Ctor):
        return Ctor(p.name, tuple(_subst_pattern(s, a) for a in p.args))
    return p


def subst_type(s: Subst, t: EventType) -> EventType:
    """Replace every variable pattern bound by s with the bound value."""
    if s.is_empty:
        return t
    return EventType(t.head, tuple(_subst_pattern(s, a) for a in t.args))


# ---------------------------------------------------------------------------
# Trace-expression graphs

EPS = "eps"
PREFIX = "prefix"
CAT = "cat"
UNION = "or"
ISECT = "and"
SHUFFLE = "shuffle"
BINDER = "binder"
REF = "ref"

_BINARY = (CAT, UNION, ISECT, SHUFFLE)


class Cell:
    """Named hole closing a cycle: an equation's body, assigned once
    after the referring nodes exist."""

    __slots__ = ("name", "body")

    def __init__(self, name: str | None = None):
        self.name = name
        self.body: Term | None = None

    def __repr__(self):
        return f"<cell {self.name or hex(id(self))}>"


class Term:
    """One interned node of a trace-expression graph.

    Identity is interning identity: two nodes built from the same shape
    and the same child identities are the same object.
    """

    __slots__ = ("store", "uid", "kind", "etype", "var", "left", "right", "cell")

    def __init__(self, store, uid, kind, etype=None, var=None, left=None, right=None, cell=None):
        self.store = store
        self.uid = uid
        self.kind = kind
        self.etype = etype
        self.var = var
        self.left = left
        self.right = right
        self.cell = cell

    def __repr__(self):
        return f"<{_short(self)}#{self.uid}>"


_OP_TEXT = {CAT: ".", UNION: "\\/", ISECT: "/\\", SHUFFLE: "|"}


def _short(t: Term, depth: int = 3) -> str:
    if t.kind == EPS:
        return "eps"
    if depth == 0:
        return "..."
    if t.kind == PREFIX:
        return f"{t.etype!r}:{_short(t.left, depth - 1)}"
    if t.kind == BINDER:
        return f"var {t.var}. {_short(t.left, depth - 1)}"
    if t.kind == REF:
        return f"@{t.cell.name or hex(id(t.cell))}"
    return f"({_short(t.left, depth - 1)} {_OP_TEXT[t.kind]} {_short(t.right, depth - 1)})"


class TermStore:
    """Interning constructor for trace-expression graphs.

    Substitution results are memoized per (node, relevant bindings), so
    specializing a cyclic equation terminates and repeated
    specializations yield stable node identities.  Construction is
    guarded by a reentrant lock; reads of built nodes are free.
    """

    def __init__(self):
        self._lock = threading.RLock()
        self._interned: dict[tuple, Term] = {}
        self._next_uid = 0
        self._memos: dict[str, dict] = {}

    def memo(self, name: str) -> dict:
        d = self._memos.get(name)
        if d is None:
            d = self._memos.setdefault(name, {})
        return d

    def _intern(self, key: tuple, **fields) -> Term:
        with self._lock:
            node = self._interned.get(key)
            if node is None:
                node = Term(self, self._next_uid, **fields)
                self._next_uid += 1
                self._interned[key] = node
            return node

    def eps(self) -> Term:
        return self._intern((EPS,), kind=EPS)

    def prefix(self, etype: EventType, tail: Term) -> Term:
        return self._intern((PREFIX, etype, tail.uid), kind=PREFIX, etype=etype, left=tail)

    def cat(self, left: Term, right: Term) -> Term:
        return self._intern((CAT, left.uid, right.uid), kind=CAT, left=left, right=right)

    def union(self, left: Term, right: Term) -> Term:
        return self._intern((UNION, left.uid, right.uid), kind=UNION, left=left, right=right)

    def isect(self, left: Term, right: Term) -> Term:
        return self._intern((ISECT, left.uid, right.uid), kind=ISECT, left=left, right=right)

    def shuffle(self, left: Term, right: Term) -> Term:
        return self._intern((SHUFFLE, left.uid, right.uid), kind=SHUFFLE, left=left, right=right)

    def binary(self, kind: str, left: Term, right: Term) -> Term:
        if kind not in _BINARY:
            raise ValueError(f"not a binary operator: {kind}")
        return self._intern((kind, left.uid, right.uid), kind=kind, left=left, right=right)

    def binder(self, name: str, body: Term) -> Term:
        return self._intern((BINDER, name, body.uid), kind=BINDER, var=name, left=body)

    def ref(self, cell: Cell) -> Term:
        return self._intern((REF, id(cell)), kind=REF, cell=cell)

    def new_cell(self, name: str | None = None) -> Cell:
        return Cell(name)


def _resolved_body(t: Term) -> Term:
    body = t.cell.body
    if body is None:
        raise RuntimeError(f"unresolved equation {t.cell.name!r}")
    return body


_NO_VARS: frozenset[str] = frozenset()


def free_vars(t: Term) -> frozenset[str]:
    """Free variables of a node, treating equations as unfoldings.

    Computed as a least fixpoint on the cyclic graph: a node revisited
    within its own evaluation contributes nothing.  Only results that
    did not depend on an in-progress node are cached, except that the
    queried root is always exact and always cached.
    """
    memo = t.store.memo("free_vars")
    hit = memo.get(t.uid)
    if hit is not None:
        return hit
    visiting: set[int] = set()

    def go(u: Term) -> tuple[frozenset[str], bool]:
        cached = memo.get(u.uid)
        if cached is not None:
            return cached, True
        if u.uid in visiting:
            return _NO_VARS, False
        visiting.add(u.uid)
        try:
            k = u.kind
            if k == EPS:
                fv, clean = _NO_VARS, True
            elif k == PREFIX:
                sub, clean = go(u.left)
                fv = vars_of(u.etype) | sub
            elif k == BINDER:
                sub, clean = go(u.left)
                fv = sub - {u.var}
            elif k == REF:
                fv, clean = go(_resolved_body(u))
            else:
                lf, cl = go(u.left)
                rf, cr = go(u.right)
                fv, clean = lf | rf, cl and cr
        finally:
            visiting.discard(u.uid)
        if clean:
            memo[u.uid] = fv
        return fv, clean

    fv, _ = go(t)
    memo[t.uid] = fv
    return fv


def subst_expr(s: Subst, t: Term) -> Term:
    """Specialize t under s: free occurrences of bound variables are
    replaced, binders shadow, and cycles are preserved by specializing
    the equations they run through.  Applying an irrelevant substitution
    returns the identical node.
    """
    store = t.store
    with store._lock:
        return _subst_term(store, s, t, store.memo("subst"))


def _subst_term(store: TermStore, s: Subst, t: Term, memo: dict) -> Term:
    s = s.restrict(free_vars(t))
    if s.is_empty:
        return t
    key = (t.uid, s.cache_key)
    hit = memo.get(key)
    if hit is not None:
        return hit
    k = t.kind
    if k == PREFIX:
        out = store.prefix(subst_type(s, t.etype), _subst_term(store, s, t.left, memo))
    elif k == BINDER:
        # s was restricted to the binder's free vars, so t.var is not in it
        out = store.binder(t.var, _subst_term(store, s, t.left, memo))
    elif k == REF:
        fresh = Cell(t.cell.name)
        out = store.ref(fresh)
        memo[key] = out  # tie the knot before descending into the body
        fresh.body = _subst_term(store, s, _resolved_body(t), memo)
        return out
    elif k in _BINARY:
        out = store.binary(
            k,
            _subst_term(store, s, t.left, memo),
            _subst_term(store, s, t.right, memo),
        )
    else:
        raise AssertionError(f"unexpected kind {k}")
    memo[key] = out
    return out


def reachable(t: Term) -> list[Term]:
    """All nodes reachable from t, crossing equation references."""
    seen: dict[int, Term] = {}
    stack = [t]
    while stack:
        u = stack.pop()
        if u.uid in seen:
            continue
        seen[u.uid] = u
        if u.kind == REF:
            stack.append(_resolved_body(u))
        else:
            if u.left is not None:
                stack.append(u.left)
            if u.right is not None:
                stack.append(u.right)
    return list(seen.values())


def graph_size(t: Term) -> int:
    return len(reachable(t))


def graph_equal(a: Term, b: Term) -> bool:
    """Structural equality of possibly-cyclic graphs, pairing equation
    cells bijectively (names are ignored)."""
    assumed: set[tuple[int, int]] = set()
    cell_ab: dict[int, Cell] = {}
    cell_ba: dict[int, Cell] = {}

    def go(x: Term, y: Term) -> bool:
        pair = (id(x), id(y))
        if pair in assumed:
            return True
        if x.kind != y.kind:
            return False
        assumed.add(pair)
        k = x.kind
        if k == EPS:
            return True
        if k == PREFIX:
            return x.etype == y.etype and go(x.left, y.left)
        if k == BINDER:
            return x.var == y.var and go(x.left, y.left)
        if k == REF:
            known = cell_ab.get(id(x.cell))
            if known is not None:
                if known is not y.cell:
                    return False
            else:
                if id(y.cell) in cell_ba:
                    return False
                cell_ab[id(x.cell)] = y.cell
                cell_ba[id(y.cell)] = x.cell
            return go(_resolved_body(x), _resolved_body(y))
        return go(x.left, y.left) and go(x.right, y.right)

    return go(a, b)
