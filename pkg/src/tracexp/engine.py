"""Streaming recognizer over trace-expression graphs.

``nullable`` decides empty-trace acceptance, ``successors`` computes
the full single-event successor set of one expression, and ``step``
lifts that to a deduplicated frontier of all live derivations.  The
frontier keeps every derivation alive (rather than committing to the
first), so a trace is rejected exactly when no derivation at all can
consume the event.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Iterable, Optional

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
    subst_expr,
)

logger = logging.getLogger("tracexp.engine")

DEFAULT_FRONTIER_CAP = 4096


class FrontierOverflow(RuntimeError):
    """The frontier exceeded its configured cap.  Raised instead of
    dropping states, since silent pruning would make verdicts unsound."""

    def __init__(self, size: int, cap: int, event_index: int):
        super().__init__(
            f"frontier grew to {size} states (cap {cap}) at event {event_index}"
        )
        self.size = size
        self.cap = cap
        self.event_index = event_index


class UnguardedRecursion(RuntimeError):
    """An equation recursed into itself without consuming an event, so
    its successor set is not finitely enumerable.  Raised instead of
    cutting the derivation, since cutting would make verdicts unsound;
    the loader warns about such equations up front."""

    def __init__(self, name):
        super().__init__(
            f"equation {name or '<anonymous>'!r} recursed without consuming an event"
        )
        self.name = name


def _body(t: Term) -> Term:
    b = t.cell.body
    if b is None:
        raise RuntimeError(f"unresolved equation {t.cell.name!r}")
    return b


def nullable(t: Term) -> bool:
    """Whether t accepts the empty trace.

    Least fixpoint on the cyclic graph: a node revisited within its own
    evaluation counts as not nullable.  True results are definitive in
    this monotone system and always cached; False results are cached
    only when independent of in-progress nodes, and the queried root is
    always exact.
    """
    memo = t.store.memo("nullable")
    hit = memo.get(t.uid)
    if hit is not None:
        return hit
    visiting: set[int] = set()

    def go(u: Term) -> tuple[bool, bool]:
        cached = memo.get(u.uid)
        if cached is not None:
            return cached, True
        if u.uid in visiting:
            return False, False
        visiting.add(u.uid)
        try:
            k = u.kind
            if k == EPS:
                v, clean = True, True
            elif k == PREFIX:
                v, clean = False, True
            elif k == BINDER:
                v, clean = go(u.left)
            elif k == REF:
                v, clean = go(_body(u))
            elif k == UNION:
                lv, lc = go(u.left)
                if lv:
                    v, clean = True, True
                else:
                    rv, rc = go(u.right)
                    v, clean = rv, rv or (lc and rc)
            else:  # CAT, ISECT, SHUFFLE require both sides
                lv, lc = go(u.left)
                if not lv:
                    v, clean = False, lc
                else:
                    v, clean = go(u.right)
        finally:
            visiting.discard(u.uid)
        if v:
            clean = True
        if clean:
            memo[u.uid] = v
        return v, clean

    v, _ = go(t)
    memo[t.uid] = v
    return v


def successors(t: Term, event: Event, ctx: MatchContext) -> list[tuple[Term, Subst]]:
    """All (successor, substitution) pairs reachable from t on event.

    Implements the full transition relation: both union branches, both
    shuffle sides, concatenation through a nullable left operand, the
    merged cross product for intersection, and binder elimination when
    the bound variable was matched.  The result is deduplicated by
    (node identity, substitution).  On prefix-guarded graphs the set is
    exact; re-entering a reference during its own expansion raises
    UnguardedRecursion.
    """
    store = t.store
    expanding: set[int] = set()

    def go(u: Term) -> list[tuple[Term, Subst]]:
        k = u.kind
        if k == EPS:
            return []
        if k == PREFIX:
            s = match(event, u.etype, ctx)
            return [] if s is None else [(u.left, s)]
        if k == UNION:
            return go(u.left) + go(u.right)
        if k == SHUFFLE:
            out = [(store.shuffle(l2, u.right), s) for l2, s in go(u.left)]
            out += [(store.shuffle(u.left, r2), s) for r2, s in go(u.right)]
            return out
        if k == CAT:
            out = [(store.cat(l2, u.right), s) for l2, s in go(u.left)]
            if nullable(u.left):
                out += go(u.right)
            return out
        if k == ISECT:
            lefts = go(u.left)
            rights = go(u.right)
            out = []
            for l2, s1 in lefts:
                for r2, s2 in rights:
                    merged = s1.merge(s2)
                    if merged is not None:
                        out.append((store.isect(l2, r2), merged))
            return out
        if k == BINDER:
            out = []
            for b2, s in go(u.left):
                if u.var in s:
                    bound = Subst({u.var: s[u.var]})
                    out.append((subst_expr(bound, b2), s.without(u.var)))
                else:
                    out.append((store.binder(u.var, b2), s))
            return out
        # REF
        cid = id(u.cell)
        if cid in expanding:
            raise UnguardedRecursion(u.cell.name)
        expanding.add(cid)
        try:
            return go(_body(u))
        finally:
            expanding.discard(cid)

    seen: dict[tuple[int, tuple], tuple[Term, Subst]] = {}
    for pair in go(t):
        key = (pair[0].uid, pair[1].cache_key)
        if key not in seen:
            seen[key] = pair
    return list(seen.values())


@dataclass(frozen=True)
class MonitorState:
    """Deduplicated frontier of live derivations plus a sticky verdict.

    ``violated_at`` is the 1-based index of the first rejected event,
    or None while alive.  Once violated, no later event changes the
    verdict.
    """

    frontier: tuple[Term, ...]
    violated_at: Optional[int] = None
    event_count: int = 0

    @property
    def alive(self) -> bool:
        return self.violated_at is None


def initial_state(program: SpecProgram) -> MonitorState:
    return MonitorState(frontier=(program.main_term(),))


_warned_unhoused: set[int] = set()


def step(
    state: MonitorState,
    event: Event,
    ctx: MatchContext,
    cap: int = DEFAULT_FRONTIER_CAP,
) -> MonitorState:
    """Advance the frontier by one event.

    Successor pairs whose substitution is non-empty witness variables
    with no enclosing binder; they are discarded here (the loader
    rejects such programs up front) and reported once.  An empty new
    frontier makes the verdict violated at this event, permanently.
    """
    count = state.event_count + 1
    if not state.alive:
        return replace(state, event_count=count)
    fresh: list[Term] = []
    seen: set[int] = set()
    for term in state.frontier:
        for succ, s in successors(term, event, ctx):
            if not s.is_empty:
                sid = id(term.store)
                if sid not in _warned_unhoused:
                    _warned_unhoused.add(sid)
                    logger.warning(
                        "discarding derivation with unhoused bindings %r; "
                        "the expression has variables outside any binder",
                        s,
                    )
                continue
            if succ.uid not in seen:
                seen.add(succ.uid)
                fresh.append(succ)
    if len(fresh) > cap:
        raise FrontierOverflow(len(fresh), cap, count)
    if not fresh:
        return MonitorState(frontier=(), violated_at=count, event_count=count)
    return MonitorState(frontier=tuple(fresh), violated_at=None, event_count=count)


def accepts_final(state: MonitorState) -> bool:
    """Whether the consumed trace is in the language — alive and some
    frontier member accepts the empty continuation — rather than merely
    a prefix of one."""
    return state.alive and any(nullable(t) for t in state.frontier)


def accepts(
    program: SpecProgram,
    events: Iterable[Event],
    cap: int = DEFAULT_FRONTIER_CAP,
) -> bool:
    """Complete-trace acceptance: fold ``step`` over the events, then
    ask for final acceptance."""
    ctx = program.match_context()
    state = initial_state(program)
    for event in events:
        state = step(state, event, ctx, cap)
        if not state.alive:
            return False
    return accepts_final(state)
