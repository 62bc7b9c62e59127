"""Independent ground-truth checker for finite traces.

Unlike the streaming engine, this module decides acceptance by
exhaustive backtracking over every rule choice, one whole trace at a
time, with no frontier sets, no interning, and no memoization.
Equation references are unfolded with an explicit depth budget
(referenced bodies cost one unit), which makes every operation total;
the budget used for a query is the trace length plus the size of the
reachable graph, enough for any derivation the trace can need.

Shared with the engine: the ``match`` function (both sides of the
system are parametric in it), substitution plumbing, and free-variable
computation used to keep untouched subgraphs shared.
"""

from __future__ import annotations

from typing import Iterator

from .domains import Event, MatchContext, SpecProgram, match
from .terms import (
    BINDER,
    CAT,
    EPS,
    ISECT,
    PREFIX,
    REF,
    SHUFFLE,
    UNION,
    Subst,
    Term,
    free_vars,
    graph_size,
    subst_type,
    vars_of,
)

DEFAULT_LENGTH_BOUND = 8

_STUCK = "stuck"


class BoundExceeded(RuntimeError):
    """The trace is longer than the configured search bound."""

    def __init__(self, length: int, bound: int):
        super().__init__(f"trace of length {length} exceeds the oracle bound {bound}")
        self.length = length
        self.bound = bound


class _Node:
    """Plain reduct node built during the search; children may be
    shared, untouched graph terms."""

    __slots__ = ("kind", "etype", "var", "left", "right")

    def __init__(self, kind, etype=None, var=None, left=None, right=None):
        self.kind = kind
        self.etype = etype
        self.var = var
        self.left = left
        self.right = right


_EPS_NODE = _Node(EPS)
_STUCK_NODE = _Node(_STUCK)


def _fv(t) -> frozenset[str]:
    if isinstance(t, Term):
        return free_vars(t)
    k = t.kind
    if k in (EPS, _STUCK):
        return frozenset()
    if k == PREFIX:
        return vars_of(t.etype) | _fv(t.left)
    if k == BINDER:
        return _fv(t.left) - {t.var}
    return _fv(t.left) | _fv(t.right)


def _substitute(t, s: Subst, depth: int):
    """Structural substitution; unfolds references as it meets them,
    spending depth, and leaves untouched subtrees shared."""
    s = s.restrict(_fv(t))
    if s.is_empty:
        return t
    k = t.kind
    if k == REF:
        if depth == 0:
            return _STUCK_NODE
        return _substitute(t.cell.body, s, depth - 1)
    if k == PREFIX:
        return _Node(PREFIX, etype=subst_type(s, t.etype), left=_substitute(t.left, s, depth))
    if k == BINDER:
        return _Node(BINDER, var=t.var, left=_substitute(t.left, s, depth))
    if k in (CAT, UNION, ISECT, SHUFFLE):
        return _Node(k, left=_substitute(t.left, s, depth), right=_substitute(t.right, s, depth))
    return t  # eps, stuck


def empty_trace_ok(t, depth: int) -> bool:
    """Empty-trace acceptance by direct structural recursion; running
    out of unfolding depth counts as rejection."""
    k = t.kind
    if k == EPS:
        return True
    if k in (PREFIX, _STUCK):
        return False
    if k == REF:
        return depth > 0 and empty_trace_ok(t.cell.body, depth - 1)
    if k == BINDER:
        return empty_trace_ok(t.left, depth)
    if k == UNION:
        return empty_trace_ok(t.left, depth) or empty_trace_ok(t.right, depth)
    return empty_trace_ok(t.left, depth) and empty_trace_ok(t.right, depth)


def transitions(t, event: Event, ctx: MatchContext, depth: int) -> Iterator[tuple[object, Subst]]:
    """Every (reduct, substitution) pair derivable for one event, found
    by trying each rule in turn."""
    k = t.kind
    if k in (EPS, _STUCK):
        return
    if k == PREFIX:
        s = match(event, t.etype, ctx)
        if s is not None:
            yield t.left, s
        return
    if k == REF:
        if depth > 0:
            yield from transitions(t.cell.body, event, ctx, depth - 1)
        return
    if k == UNION:
        yield from transitions(t.left, event, ctx, depth)
        yield from transitions(t.right, event, ctx, depth)
        return
    if k == SHUFFLE:
        for l2, s in transitions(t.left, event, ctx, depth):
            yield _Node(SHUFFLE, left=l2, right=t.right), s
        for r2, s in transitions(t.right, event, ctx, depth):
            yield _Node(SHUFFLE, left=t.left, right=r2), s
        return
    if k == CAT:
        for l2, s in transitions(t.left, event, ctx, depth):
            yield _Node(CAT, left=l2, right=t.right), s
        if empty_trace_ok(t.left, depth):
            yield from transitions(t.right, event, ctx, depth)
        return
    if k == ISECT:
        rights = list(transitions(t.right, event, ctx, depth))
        for l2, s1 in transitions(t.left, event, ctx, depth):
            for r2, s2 in rights:
                merged = s1.merge(s2)
                if merged is not None:
                    yield _Node(ISECT, left=l2, right=r2), merged
        return
    if k == BINDER:
        for b2, s in transitions(t.left, event, ctx, depth):
            if t.var in s:
                bound = Subst({t.var: s[t.var]})
                yield _substitute(b2, bound, depth), s.without(t.var)
            else:
                yield _Node(BINDER, var=t.var, left=b2), s
        return
    raise AssertionError(f"unexpected kind {k}")


def oracle_accepts(
    program: SpecProgram,
    events,
    length_bound: int = DEFAULT_LENGTH_BOUND,
) -> bool:
    """Whether some derivation consumes the whole trace, each step with
    an empty top-level substitution, and ends accepting the empty
    continuation."""
    events = list(events)
    if len(events) > length_bound:
        raise BoundExceeded(len(events), length_bound)
    ctx = program.match_context()
    root = program.main_term()
    depth = len(events) + graph_size(root)

    def search(t, index: int) -> bool:
        if index == len(events):
            return empty_trace_ok(t, depth)
        for t2, s in transitions(t, events[index], ctx, depth):
            if s.is_empty and search(t2, index + 1):
                return True
        return False

    return search(root, 0)
