"""Event domains: wire-event decoding and the match function.

Two base domains are built in.  The ``funcs`` domain observes function
and callback calls with the wire shape ``{"event": ..., "name": ...,
"id": ..., "args": [...], "ret": ...?}``; the ``msgs`` domain observes
typed messages with the shape ``{"type": ..., "payload": ...}``.
Derived event types are declared as clauses rewriting a head type to a
base (or earlier-declared) type, optionally filtered by comparison
guards.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Any, Optional

from .terms import (
    Cell,
    EventType,
    Lit,
    Pattern,
    Seq,
    Subst,
    Term,
    TermStore,
    Var,
    Wild,
    value_eq,
    vars_of,
)

logger = logging.getLogger("tracexp.domains")

_ABSENT = object()


class DecodeError(ValueError):
    """Raised for malformed wire events."""

    def __init__(self, reason: str, position: int = 0):
        super().__init__(reason)
        self.reason = reason
        self.position = position


class UnknownTypeName(LookupError):
    """An event type head that is neither a base type nor declared."""

    def __init__(self, head: str, arity: int):
        super().__init__(f"unknown event type {head}/{arity}")
        self.head = head
        self.arity = arity


@dataclass(frozen=True)
class Event:
    """A structured value received from the monitored system; the
    top-level payload is always a map."""

    payload: dict

    def __repr__(self):
        return f"Event({self.payload!r})"


def _reject_const(token):
    raise ValueError(f"non-standard JSON constant {token!r}")


def decode_event(raw: str | bytes) -> Event:
    """Parse one wire event; the document must be a JSON map."""
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DecodeError(f"invalid UTF-8: {exc}", exc.start) from exc
    try:
        doc = json.loads(raw, parse_constant=_reject_const)
    except json.JSONDecodeError as exc:
        raise DecodeError(exc.msg, exc.pos) from exc
    except ValueError as exc:
        raise DecodeError(str(exc)) from exc
    if not isinstance(doc, dict):
        raise DecodeError("top level of an event must be a map")
    return Event(doc)


# ---------------------------------------------------------------------------
# Base domains

@dataclass(frozen=True)
class _BaseShape:
    discriminator: Optional[tuple[str, str]]  # (field, required value)
    fields: tuple[str, ...]


# funcs: calls to and returns from API functions and their callbacks,
# coupled by a per-call identifier.  func_post optionally exposes the
# returned value as a fourth argument.
_FUNC_FIELDS = ("name", "id", "args")
_BASE_DOMAINS: dict[str, dict[tuple[str, int], _BaseShape]] = {
    "funcs": {
        ("func_pre", 3): _BaseShape(("event", "func_pre"), _FUNC_FIELDS),
        ("func_post", 3): _BaseShape(("event", "func_post"), _FUNC_FIELDS),
        ("func_post", 4): _BaseShape(("event", "func_post"), _FUNC_FIELDS + ("ret",)),
        ("cb_pre", 3): _BaseShape(("event", "cb_pre"), _FUNC_FIELDS),
        ("cb_post", 3): _BaseShape(("event", "cb_post"), _FUNC_FIELDS),
    },
    "msgs": {
        ("msg", 2): _BaseShape(None, ("type", "payload")),
    },
}


def base_domain_names() -> tuple[str, ...]:
    return tuple(_BASE_DOMAINS)


def base_type_names(domain: str) -> frozenset[str]:
    return frozenset(name for name, _ in _BASE_DOMAINS[domain])


def is_base_type(domain: str, head: str, arity: int) -> bool:
    return (head, arity) in _BASE_DOMAINS.get(domain, {})


# ---------------------------------------------------------------------------
# Guards and derived-type clauses

_GUARD_OPS = ("==", "!=", ">", ">=", "<", "<=")


@dataclass(frozen=True)
class Guard:
    """Binary comparison between variables and literals; ordering
    operators apply to numbers only."""

    op: str
    lhs: Pattern  # Var or Lit
    rhs: Pattern

    def __repr__(self):
        return f"{self.lhs!r} {self.op} {self.rhs!r}"


@dataclass(frozen=True)
class TypeClause:
    """One derived-type rewrite: the head matches an event whenever the
    body does under the head-argument bindings and all guards hold."""

    head: EventType
    body: EventType
    guards: tuple[Guard, ...] = ()


@dataclass(frozen=True)
class MatchContext:
    """The active base domain plus the derived-type clauses, indexed by
    (head name, arity).  Immutable after load; match is pure."""

    domain: str
    clauses: dict[tuple[str, int], tuple[TypeClause, ...]] = field(default_factory=dict)

    @staticmethod
    def build(domain: str, clauses=()) -> "MatchContext":
        index: dict[tuple[str, int], list[TypeClause]] = {}
        for c in clauses:
            index.setdefault((c.head.head, c.head.arity), []).append(c)
        return MatchContext(domain, {k: tuple(v) for k, v in index.items()})

    def knows(self, head: str, arity: int) -> bool:
        return is_base_type(self.domain, head, arity) or (head, arity) in self.clauses


# ---------------------------------------------------------------------------
# Matching

def match_pattern(p: Pattern, value: Any, bindings: dict) -> bool:
    """Match one pattern against a value, extending bindings; repeated
    variables must agree under value_eq."""
    if isinstance(p, Wild):
        return True
    if isinstance(p, Lit):
        return value_eq(p.value, value)
    if isinstance(p, Var):
        if p.name in bindings:
            return value_eq(bindings[p.name], value)
        bindings[p.name] = value
        return True
    if isinstance(p, Seq):
        if not isinstance(value, list):
            return False
        if p.tail is None:
            if len(value) != len(p.items):
                return False
        elif len(value) < len(p.items):
            return False
        for item, v in zip(p.items, value):
            if not match_pattern(item, v, bindings):
                return False
        if p.tail is not None:
            return match_pattern(p.tail, value[len(p.items):], bindings)
        return True
    # Ctor: no wire value has this shape
    return False


def _match_field(p: Pattern, payload: dict, name: str, bindings: dict) -> bool:
    value = payload.get(name, _ABSENT)
    if value is _ABSENT:
        # only a wildcard tolerates a missing field
        return isinstance(p, Wild)
    return match_pattern(p, value, bindings)


def match_base(event: Event, t: EventType, domain: str) -> Optional[Subst]:
    """Match against a base type of the given domain; None on failure."""
    shape = _BASE_DOMAINS[domain].get((t.head, t.arity))
    if shape is None:
        raise UnknownTypeName(t.head, t.arity)
    payload = event.payload
    if shape.discriminator is not None:
        disc_field, disc_value = shape.discriminator
        if payload.get(disc_field) != disc_value:
            return None
    bindings: dict[str, Any] = {}
    for p, name in zip(t.args, shape.fields):
        if not _match_field(p, payload, name, bindings):
            return None
    return Subst(bindings)


_warned_guards: set[tuple] = set()


def _guard_operand(p: Pattern, bindings: dict):
    if isinstance(p, Lit):
        return p.value
    if isinstance(p, Var):
        if p.name in bindings:
            return bindings[p.name]
        return _ABSENT
    return _ABSENT


def _warn_guard_once(key: tuple, message: str) -> None:
    if key not in _warned_guards:
        _warned_guards.add(key)
        logger.warning(message)


def _guard_holds(g: Guard, bindings: dict) -> bool:
    lhs = _guard_operand(g.lhs, bindings)
    rhs = _guard_operand(g.rhs, bindings)
    if lhs is _ABSENT or rhs is _ABSENT:
        _warn_guard_once(
            ("unresolved", g.op, repr(g.lhs), repr(g.rhs)),
            f"guard {g!r} has an unresolved operand; clause skipped",
        )
        return False
    if g.op == "==":
        return value_eq(lhs, rhs)
    if g.op == "!=":
        return not value_eq(lhs, rhs)
    for v in (lhs, rhs):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            # ordering guards apply only to numbers
            _warn_guard_once(
                ("type", g.op, repr(g.lhs), repr(g.rhs)),
                f"ordering guard {g!r} applied to non-number {v!r}; clause skipped",
            )
            return False
    if g.op == ">":
        return lhs > rhs
    if g.op == ">=":
        return lhs >= rhs
    if g.op == "<":
        return lhs < rhs
    return lhs <= rhs


def _fill_params(p: Pattern, mapping: dict[str, Pattern]) -> Pattern:
    if isinstance(p, Var):
        return mapping.get(p.name, p)
    if isinstance(p, Seq):
        items = tuple(_fill_params(it, mapping) for it in p.items)
        tail = _fill_params(p.tail, mapping) if p.tail is not None else None
        return Seq(items, tail)
    return p


def match_derived(event: Event, t: EventType, ctx: MatchContext) -> Optional[Subst]:
    """Try the clauses for t's head in declaration order; the first
    whose body matches under the head-argument bindings and whose
    guards all hold wins.  The result is restricted to vars_of(t)."""
    clauses = ctx.clauses.get((t.head, t.arity))
    if not clauses:
        raise UnknownTypeName(t.head, t.arity)
    want = vars_of(t)
    for clause in clauses:
        mapping = {
            param.name: arg
            for param, arg in zip(clause.head.args, t.args)
            if isinstance(param, Var)
        }
        body = EventType(
            clause.body.head,
            tuple(_fill_params(a, mapping) for a in clause.body.args),
        )
        result = match(event, body, ctx)
        if result is None:
            continue
        bindings = dict(result)
        ok = True
        for g in clause.guards:
            g2 = Guard(g.op, _fill_params(g.lhs, mapping), _fill_params(g.rhs, mapping))
            if not _guard_holds(g2, bindings):
                ok = False
                break
        if not ok:
            continue
        if not all(name in bindings for name in want):
            # a head parameter the body never constrained; unbindable
            continue
        return Subst({name: bindings[name] for name in want})
    return None


def match(event: Event, t: EventType, ctx: MatchContext) -> Optional[Subst]:
    """Match an event against an event type.  On success the domain of
    the substitution is exactly vars_of(t); None is the normal
    no-match outcome."""
    if is_base_type(ctx.domain, t.head, t.arity):
        return match_base(event, t, ctx.domain)
    if (t.head, t.arity) in ctx.clauses:
        return match_derived(event, t, ctx)
    raise UnknownTypeName(t.head, t.arity)


# ---------------------------------------------------------------------------
# Loaded programs

@dataclass
class SpecProgram:
    """A loaded system of equations plus derived-type clauses.

    ``equations`` maps equation names to their graph cells; ``main``
    names the entry equation.  Instances are immutable after load
    except for the store's internal memo tables.
    """

    store: TermStore
    equations: dict[str, Cell]
    main: str
    domain: str
    clauses: tuple[TypeClause, ...] = ()
    warnings: list = field(default_factory=list)

    def main_term(self) -> Term:
        return self.store.ref(self.equations[self.main])

    def match_context(self) -> MatchContext:
        ctx = getattr(self, "_ctx", None)
        if ctx is None:
            ctx = MatchContext.build(self.domain, self.clauses)
            self._ctx = ctx
        return ctx
