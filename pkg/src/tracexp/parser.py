"""Textual specification language for equation systems over trace
expressions, plus the inverse formatter.

    domain funcs;
    main T;

    T = eps \\/ open : W;
    W = write : W \\/ close : eps;

    type open matches func_post("fs.openSync", _, _, _);

Operators, tightest first: ``:`` (event-type prefix, right
associative), ``.`` (concatenation), ``/\\`` (intersection), ``\\/``
(union), ``|`` (shuffle); binary operators associate to the left, and
``var x.`` extends to the end of the enclosing expression.  Comments
run from ``--`` to end of line.  Sources are UTF-8, conventionally in
".texp" files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Optional

from .domains import (
    Guard,
    SpecProgram,
    TypeClause,
    base_domain_names,
    base_type_names,
    is_base_type,
)
from .terms import (
    BINDER,
    CAT,
    EPS,
    ISECT,
    PREFIX,
    REF,
    SHUFFLE,
    UNION,
    Cell,
    EventType,
    Lit,
    Pattern,
    Seq,
    Term,
    TermStore,
    Var,
    WILD,
    Wild,
    free_vars,
    vars_of,
)


@dataclass(frozen=True)
class SourceSpan:
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __str__(self):
        return f"{self.start_line}:{self.start_col}"

    def merge(self, other: "SourceSpan") -> "SourceSpan":
        return SourceSpan(self.start_line, self.start_col, other.end_line, other.end_col)


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str  # "error" | "warning"
    span: SourceSpan
    message: str

    def __str__(self):
        return f"{self.span}: {self.severity}: {self.message}"


class SpecLoadError(Exception):
    """Loading failed; carries every diagnostic collected."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


# ---------------------------------------------------------------------------
# Lexer

_KEYWORDS = frozenset({"domain", "main", "type", "matches", "where", "var", "eps"})
_TWO_CHAR = ("==", "!=", ">=", "<=", "/\\", "\\/")
_ONE_CHAR = ";=:.,()[]|_><"
_GUARD_OPS = frozenset({"==", "!=", ">", ">=", "<", "<="})


@dataclass(frozen=True)
class Token:
    kind: str  # "name", "literal", "eof", or the operator text itself
    text: str
    value: Any
    span: SourceSpan


class _LexError(Exception):
    def __init__(self, diag: ParseDiagnostic):
        self.diag = diag


def _tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col, i, n = 1, 1, 0, len(source)

    def span_from(l0, c0):
        return SourceSpan(l0, c0, line, col - 1 if col > 1 else 1)

    def fail(l0, c0, msg):
        raise _LexError(ParseDiagnostic("error", SourceSpan(l0, c0, l0, c0), msg))

    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("--", i):
            while i < n and source[i] != "\n":
                i += 1
                col += 1
            continue
        l0, c0 = line, col
        if ch == '"':
            j = i + 1
            while j < n and source[j] != '"':
                if source[j] == "\\":
                    j += 1
                if j < n and source[j] == "\n":
                    fail(l0, c0, "unterminated string literal")
                j += 1
            if j >= n:
                fail(l0, c0, "unterminated string literal")
            text = source[i : j + 1]
            try:
                value = json.loads(text)
            except ValueError:
                fail(l0, c0, f"invalid string literal {text}")
            col += len(text)
            i = j + 1
            tokens.append(Token("literal", text, value, span_from(l0, c0)))
            continue
        if ch.isdigit() or (ch == "-" and i + 1 < n and source[i + 1].isdigit()):
            j = i + 1
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == "." and j + 1 < n and source[j + 1].isdigit():
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    j = k
                    while j < n and source[j].isdigit():
                        j += 1
            text = source[i:j]
            value = json.loads(text)
            col += len(text)
            i = j
            tokens.append(Token("literal", text, value, span_from(l0, c0)))
            continue
        if ch.isalpha():
            j = i + 1
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            col += len(text)
            i = j
            sp = span_from(l0, c0)
            if text in ("true", "false", "null"):
                tokens.append(Token("literal", text, json.loads(text), sp))
            elif text in _KEYWORDS:
                tokens.append(Token(text, text, None, sp))
            else:
                tokens.append(Token("name", text, text, sp))
            continue
        two = source[i : i + 2]
        if two in _TWO_CHAR:
            col += 2
            i += 2
            tokens.append(Token(two, two, None, span_from(l0, c0)))
            continue
        if ch in _ONE_CHAR:
            col += 1
            i += 1
            tokens.append(Token(ch, ch, None, span_from(l0, c0)))
            continue
        fail(l0, c0, f"unexpected character {ch!r}")
    tokens.append(Token("eof", "", None, SourceSpan(line, col, line, col)))
    return tokens


# ---------------------------------------------------------------------------
# Syntax trees (spans survive until the build phase)

@dataclass(frozen=True)
class PatAst:
    kind: str  # "lit", "var", "wild", "seq"
    span: SourceSpan
    value: Any = None
    name: str = ""
    items: tuple = ()
    tail: Optional["PatAst"] = None


@dataclass(frozen=True)
class TypeHeadAst:
    name: str
    args: tuple[PatAst, ...]
    span: SourceSpan


@dataclass(frozen=True)
class ExprAst:
    kind: str  # "eps", "prefix", "bin", "binder", "ref"
    span: SourceSpan
    op: str = ""
    head: Optional[TypeHeadAst] = None
    left: Optional["ExprAst"] = None
    right: Optional["ExprAst"] = None
    name: str = ""


@dataclass(frozen=True)
class GuardAst:
    op: str
    lhs: PatAst
    rhs: PatAst
    span: SourceSpan


@dataclass(frozen=True)
class ClauseAst:
    head: TypeHeadAst
    body: TypeHeadAst
    guards: tuple[GuardAst, ...]
    span: SourceSpan


class _SyntaxError(Exception):
    def __init__(self, diag: ParseDiagnostic):
        self.diag = diag


_BIN_LEVEL = {"|": 0, "\\/": 1, "/\\": 2, ".": 3}
_LEVEL_OP = {0: SHUFFLE, 1: UNION, 2: ISECT, 3: CAT}
_OP_BY_TEXT = {"|": SHUFFLE, "\\/": UNION, "/\\": ISECT, ".": CAT}


class _Parser:
    def __init__(self, source: str):
        self.diags: list[ParseDiagnostic] = []
        try:
            self.tokens = _tokenize(source)
        except _LexError as exc:
            self.diags.append(exc.diag)
            self.tokens = [Token("eof", "", None, exc.diag.span)]
        self.i = 0

    # -- token helpers ------------------------------------------------
    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def at(self, kind: str) -> bool:
        return self.peek().kind == kind

    def expect(self, kind: str, what: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            label = what or f"'{kind}'"
            raise _SyntaxError(
                ParseDiagnostic(
                    "error", tok.span, f"expected {label}, found {tok.text or 'end of input'!r}"
                )
            )
        return self.advance()

    def error_here(self, message: str) -> _SyntaxError:
        return _SyntaxError(ParseDiagnostic("error", self.peek().span, message))

    def sync_to_semicolon(self) -> None:
        while not self.at("eof") and not self.at(";"):
            self.advance()
        if self.at(";"):
            self.advance()

    # -- grammar ------------------------------------------------------
    def parse_program(self):
        domain = main = None
        try:
            self.expect("domain")
            domain = self.expect("name", "a domain name")
            self.expect(";")
            self.expect("main")
            main = self.expect("name", "the main equation name")
            self.expect(";")
        except _SyntaxError as exc:
            self.diags.append(exc.diag)
            self.sync_to_semicolon()
        equations: list[tuple[Token, ExprAst]] = []
        clauses: list[ClauseAst] = []
        while not self.at("eof"):
            try:
                if self.at("type"):
                    clauses.append(self.parse_clause())
                elif self.at("name"):
                    name = self.advance()
                    self.expect("=")
                    body = self.parse_expr(0)
                    self.expect(";")
                    equations.append((name, body))
                else:
                    raise self.error_here("expected an equation or a 'type' clause")
            except _SyntaxError as exc:
                self.diags.append(exc.diag)
                self.sync_to_semicolon()
        return domain, main, equations, clauses

    def parse_clause(self) -> ClauseAst:
        start = self.expect("type")
        head = self.parse_typehead()
        self.expect("matches")
        body = self.parse_typehead()
        guards: list[GuardAst] = []
        if self.at("where"):
            self.advance()
            guards.append(self.parse_guard())
            while self.at(","):
                self.advance()
                guards.append(self.parse_guard())
        end = self.expect(";")
        return ClauseAst(head, body, tuple(guards), start.span.merge(end.span))

    def parse_guard(self) -> GuardAst:
        lhs = self.parse_guard_operand()
        op_tok = self.peek()
        if op_tok.kind not in _GUARD_OPS:
            raise self.error_here("expected a comparison operator in guard")
        self.advance()
        rhs = self.parse_guard_operand()
        return GuardAst(op_tok.kind, lhs, rhs, lhs.span.merge(rhs.span))

    def parse_guard_operand(self) -> PatAst:
        tok = self.peek()
        if tok.kind == "name":
            self.advance()
            return PatAst("var", tok.span, name=tok.value)
        if tok.kind == "literal":
            self.advance()
            return PatAst("lit", tok.span, value=tok.value)
        raise self.error_here("expected a variable or literal in guard")

    def parse_typehead(self) -> TypeHeadAst:
        name = self.expect("name", "an event type name")
        args: list[PatAst] = []
        end_span = name.span
        if self.at("("):
            self.advance()
            args.append(self.parse_pattern())
            while self.at(","):
                self.advance()
                args.append(self.parse_pattern())
            end_span = self.expect(")").span
        return TypeHeadAst(name.value, tuple(args), name.span.merge(end_span))

    def parse_pattern(self) -> PatAst:
        tok = self.peek()
        if tok.kind == "literal":
            self.advance()
            return PatAst("lit", tok.span, value=tok.value)
        if tok.kind == "name":
            self.advance()
            return PatAst("var", tok.span, name=tok.value)
        if tok.kind == "_":
            self.advance()
            return PatAst("wild", tok.span)
        if tok.kind == "[":
            start = self.advance()
            items = [self.parse_pattern()]
            while self.at(","):
                self.advance()
                items.append(self.parse_pattern())
            tail = None
            if self.at("|"):
                self.advance()
                tail = self.parse_pattern()
            end = self.expect("]")
            return PatAst("seq", start.span.merge(end.span), items=tuple(items), tail=tail)
        raise self.error_here("expected a pattern")

    def parse_expr(self, min_level: int) -> ExprAst:
        left = self.parse_atom()
        while True:
            tok = self.peek()
            level = _BIN_LEVEL.get(tok.kind)
            if level is None or level < min_level:
                return left
            self.advance()
            right = self.parse_expr(level + 1)
            left = ExprAst(
                "bin", left.span.merge(right.span), op=_OP_BY_TEXT[tok.kind],
                left=left, right=right,
            )

    def parse_atom(self) -> ExprAst:
        tok = self.peek()
        if tok.kind == "eps":
            self.advance()
            return ExprAst("eps", tok.span)
        if tok.kind == "(":
            self.advance()
            inner = self.parse_expr(0)
            end = self.expect(")")
            return ExprAst(
                inner.kind, tok.span.merge(end.span), op=inner.op, head=inner.head,
                left=inner.left, right=inner.right, name=inner.name,
            )
        if tok.kind == "var":
            self.advance()
            name = self.expect("name", "a variable name")
            self.expect(".")
            body = self.parse_expr(0)  # the binder extends to the enclosing end
            return ExprAst("binder", tok.span.merge(body.span), name=name.value, left=body)
        if tok.kind == "name":
            if self.peek(1).kind == "(":
                head = self.parse_typehead()
                self.expect(":", "':' after an event type")
                tail = self.parse_atom()
                return ExprAst("prefix", head.span.merge(tail.span), head=head, left=tail)
            if self.peek(1).kind == ":":
                self.advance()
                head = TypeHeadAst(tok.value, (), tok.span)
                self.advance()  # ':'
                tail = self.parse_atom()
                return ExprAst("prefix", head.span.merge(tail.span), head=head, left=tail)
            self.advance()
            return ExprAst("ref", tok.span, name=tok.value)
        raise self.error_here("expected an expression")


# ---------------------------------------------------------------------------
# Build phase: resolve names, run the load-time checks

def _build_pattern(ast: PatAst) -> Pattern:
    if ast.kind == "lit":
        return Lit(ast.value)
    if ast.kind == "var":
        return Var(ast.name)
    if ast.kind == "wild":
        return WILD
    return Seq(
        tuple(_build_pattern(it) for it in ast.items),
        _build_pattern(ast.tail) if ast.tail is not None else None,
    )


def _build_event_type(ast: TypeHeadAst) -> EventType:
    return EventType(ast.name, tuple(_build_pattern(a) for a in ast.args))


def _guard_pattern(ast: PatAst) -> Pattern:
    return Lit(ast.value) if ast.kind == "lit" else Var(ast.name)


class _Builder:
    def __init__(self, source: str):
        parser = _Parser(source)
        self.domain_tok, self.main_tok, self.eq_asts, self.clause_asts = parser.parse_program()
        self.diags = parser.diags
        self.store = TermStore()

    def error(self, span: SourceSpan, message: str) -> None:
        self.diags.append(ParseDiagnostic("error", span, message))

    def build(self) -> SpecProgram:
        domain = self.domain_tok.value if self.domain_tok else ""
        if self.domain_tok and domain not in base_domain_names():
            known = ", ".join(base_domain_names())
            self.error(self.domain_tok.span, f"unknown domain {domain!r} (known: {known})")

        clauses = self._build_clauses(domain)
        type_keys = {(c.head.head, c.head.arity) for c in clauses}

        cells: dict[str, Cell] = {}
        for name_tok, _ in self.eq_asts:
            if name_tok.value in cells:
                self.error(name_tok.span, f"duplicate equation {name_tok.value!r}")
            else:
                cells[name_tok.value] = self.store.new_cell(name_tok.value)

        for name_tok, body_ast in self.eq_asts:
            cell = cells.get(name_tok.value)
            body = self._build_expr(body_ast, domain, type_keys, cells)
            if cell is not None and cell.body is None:
                cell.body = body

        main = self.main_tok.value if self.main_tok else ""
        if self.main_tok and main not in cells:
            self.error(self.main_tok.span, f"main equation {main!r} is not defined")

        warnings: list[ParseDiagnostic] = []
        if not any(d.severity == "error" for d in self.diags):
            fv = free_vars(self.store.ref(cells[main]))
            if fv:
                names = ", ".join(sorted(fv))
                self.error(
                    self.main_tok.span,
                    f"main expression has free variables outside any binder: {names}",
                )
            warnings.extend(self._unguarded_cycle_warnings(cells, main))

        errors = [d for d in self.diags if d.severity == "error"]
        if errors:
            raise SpecLoadError(self.diags)
        warnings = [d for d in self.diags if d.severity == "warning"] + warnings
        return SpecProgram(
            store=self.store,
            equations=cells,
            main=main,
            domain=domain,
            clauses=tuple(clauses),
            warnings=warnings,
        )

    def _build_clauses(self, domain: str) -> list[TypeClause]:
        clauses: list[TypeClause] = []
        known_derived: set[tuple[str, int]] = set()
        base_names = base_type_names(domain) if domain in base_domain_names() else frozenset()
        for ast in self.clause_asts:
            head = _build_event_type(ast.head)
            key = (head.head, head.arity)
            if head.head in base_names:
                self.error(ast.head.span, f"clause head {head.head!r} shadows a base type")
                continue
            params: list[str] = []
            bad = False
            for arg_ast, arg in zip(ast.head.args, head.args):
                if not isinstance(arg, Var):
                    self.error(arg_ast.span, "clause head parameters must be variables")
                    bad = True
                elif arg.name in params:
                    self.error(arg_ast.span, f"duplicate clause head parameter {arg.name!r}")
                    bad = True
                else:
                    params.append(arg.name)
            body = _build_event_type(ast.body)
            body_key = (body.head, body.arity)
            body_known = (
                is_base_type(domain, *body_key) if domain in base_domain_names() else False
            ) or (body_key in known_derived and body_key != key)
            if not body_known:
                self.error(
                    ast.body.span,
                    f"clause body type {body.head}/{body.arity} is not a base type "
                    "or a previously defined one",
                )
                bad = True
            guards = tuple(
                Guard(g.op, _guard_pattern(g.lhs), _guard_pattern(g.rhs)) for g in ast.guards
            )
            body_vars = vars_of(body)
            guard_vars = {
                p.name for g in guards for p in (g.lhs, g.rhs) if isinstance(p, Var)
            }
            for g_ast, g in zip(ast.guards, guards):
                for p in (g.lhs, g.rhs):
                    if isinstance(p, Var) and p.name not in params and p.name not in body_vars:
                        self.error(
                            g_ast.span,
                            f"guard variable {p.name!r} is bound by neither head nor body",
                        )
                        bad = True
            for arg_ast, name in zip(ast.head.args, params):
                if name not in body_vars and name not in guard_vars:
                    self.error(
                        arg_ast.span,
                        f"head parameter {name!r} occurs in neither body nor guards",
                    )
                    bad = True
            if not bad:
                clauses.append(TypeClause(head, body, guards))
                known_derived.add(key)
        return clauses

    def _build_expr(self, ast: ExprAst, domain, type_keys, cells) -> Term:
        store = self.store
        if ast.kind == "eps":
            return store.eps()
        if ast.kind == "prefix":
            etype = _build_event_type(ast.head)
            key = (etype.head, etype.arity)
            known = (
                domain in base_domain_names() and is_base_type(domain, *key)
            ) or key in type_keys
            if not known:
                self.error(ast.head.span, f"unknown event type {etype.head}/{etype.arity}")
            return store.prefix(etype, self._build_expr(ast.left, domain, type_keys, cells))
        if ast.kind == "binder":
            return store.binder(ast.name, self._build_expr(ast.left, domain, type_keys, cells))
        if ast.kind == "bin":
            return store.binary(
                ast.op,
                self._build_expr(ast.left, domain, type_keys, cells),
                self._build_expr(ast.right, domain, type_keys, cells),
            )
        # ref
        cell = cells.get(ast.name)
        if cell is None:
            self.error(ast.span, f"unknown equation {ast.name!r}")
            return store.eps()
        return store.ref(cell)

    def _unguarded_cycle_warnings(self, cells, main) -> list[ParseDiagnostic]:
        """A cycle never crossing a prefix makes the transition relation
        self-referential; the engine cuts such derivations, so warn."""
        from .engine import nullable  # deferred: engine is heavier than the parser

        # cell -> cells whose reference the step relation can reach
        # without consuming an event
        def targets(t: Term, acc: set[str]) -> None:
            k = t.kind
            if k == REF:
                if t.cell.name is not None:
                    acc.add(t.cell.name)
            elif k == CAT:
                targets(t.left, acc)
                if nullable(t.left):
                    targets(t.right, acc)
            elif k in (UNION, ISECT, SHUFFLE):
                targets(t.left, acc)
                targets(t.right, acc)
            elif k == BINDER:
                targets(t.left, acc)
            # prefix guards its tail; eps has no children

        edges: dict[str, set[str]] = {}
        for name, cell in cells.items():
            acc: set[str] = set()
            if cell.body is not None:
                targets(cell.body, acc)
            edges[name] = acc

        flagged: set[str] = set()
        for start in edges:
            stack, reached = [start], set()
            while stack:
                for nxt in edges.get(stack.pop(), ()):
                    if nxt == start:
                        flagged.add(start)
                        stack = []
                        break
                    if nxt not in reached:
                        reached.add(nxt)
                        stack.append(nxt)

        warnings: list[ParseDiagnostic] = []
        for name in sorted(flagged):
            span = SourceSpan(1, 1, 1, 1)
            for name_tok, _ in self.eq_asts:
                if name_tok.value == name:
                    span = name_tok.span
                    break
            warnings.append(
                ParseDiagnostic(
                    "warning",
                    span,
                    f"equation {name!r} can recurse without consuming an event; "
                    "stepping it will fail",
                )
            )
        return warnings


def parse_spec(source: str) -> SpecProgram:
    """Parse, resolve, and check a specification; raises SpecLoadError
    carrying diagnostics when any error was found."""
    return _Builder(source).build()


def parse_spec_file(path) -> SpecProgram:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_spec(fh.read())


# ---------------------------------------------------------------------------
# Formatter

_RENDER_LEVEL = {SHUFFLE: 0, UNION: 1, ISECT: 2, CAT: 3}
_RENDER_OP = {SHUFFLE: "|", UNION: "\\/", ISECT: "/\\", CAT: "."}


def _render_pattern(p: Pattern) -> str:
    if isinstance(p, Wild):
        return "_"
    if isinstance(p, Var):
        return p.name
    if isinstance(p, Lit):
        return json.dumps(p.value)
    if isinstance(p, Seq):
        inner = ", ".join(_render_pattern(it) for it in p.items)
        if p.tail is not None:
            inner += f" | {_render_pattern(p.tail)}"
        return f"[{inner}]"
    return f"{p.name}({', '.join(_render_pattern(a) for a in p.args)})"


def _render_type(t: EventType) -> str:
    if not t.args:
        return t.head
    return f"{t.head}({', '.join(_render_pattern(a) for a in t.args)})"


def _render_expr(t: Term, min_level: int, names: dict[int, str]) -> str:
    k = t.kind
    if k == EPS:
        return "eps"
    if k == REF:
        return names[id(t.cell)]
    if k == PREFIX:
        text = f"{_render_type(t.etype)} : {_render_expr(t.left, 4, names)}"
        return f"({text})" if min_level > 4 else text
    if k == BINDER:
        text = f"var {t.var}. {_render_expr(t.left, 0, names)}"
        return f"({text})" if min_level > 0 else text
    level = _RENDER_LEVEL[k]
    text = (
        f"{_render_expr(t.left, level, names)} {_RENDER_OP[k]} "
        f"{_render_expr(t.right, level + 1, names)}"
    )
    return f"({text})" if level < min_level else text


def _collect_cells(roots) -> list[Cell]:
    seen: list[Cell] = []
    seen_ids: set[int] = set()
    stack = list(roots)
    while stack:
        t = stack.pop()
        if t.kind == REF:
            if id(t.cell) not in seen_ids:
                seen_ids.add(id(t.cell))
                seen.append(t.cell)
                if t.cell.body is not None:
                    stack.append(t.cell.body)
        else:
            if t.left is not None:
                stack.append(t.left)
            if t.right is not None:
                stack.append(t.right)
    return seen


def _render_guard(g: Guard) -> str:
    return f"{_render_pattern(g.lhs)} {g.op} {_render_pattern(g.rhs)}"


def format_spec(program: SpecProgram) -> str:
    """Render a program back to source text; parsing the result yields
    node-for-node identical graphs (generated equation names aside)."""
    names: dict[int, str] = {}
    used: set[str] = set()
    order: list[Cell] = []
    for name, cell in program.equations.items():
        names[id(cell)] = name
        used.add(name)
        order.append(cell)
    extra = _collect_cells(cell.body for cell in order if cell.body is not None)
    counter = 0
    for cell in extra:
        if id(cell) in names:
            continue
        base = cell.name or "Q"
        candidate = base
        while candidate in used:
            counter += 1
            candidate = f"{base}_{counter}"
        names[id(cell)] = candidate
        used.add(candidate)
        order.append(cell)

    lines = [f"domain {program.domain};", f"main {program.main};", ""]
    for cell in order:
        body = _render_expr(cell.body, 0, names)
        lines.append(f"{names[id(cell)]} = {body};")
    if program.clauses:
        lines.append("")
    for clause in program.clauses:
        text = f"type {_render_type(clause.head)} matches {_render_type(clause.body)}"
        if clause.guards:
            text += " where " + ", ".join(_render_guard(g) for g in clause.guards)
        lines.append(text + ";")
    return "\n".join(lines) + "\n"
