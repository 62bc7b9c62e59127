"""Wire decoding and the match function over both base domains."""

import pytest
from conftest import cb_pre, func_post, func_pre, load_fixture_program, msg

from tracexp import (
    DecodeError,
    EventType,
    Lit,
    MatchContext,
    Seq,
    Subst,
    UnknownTypeName,
    Var,
    WILD,
    decode_event,
    match,
    subst_type,
    vars_of,
)
from tracexp.domains import Guard, TypeClause, match_base


def et(head, *args):
    return EventType(head, args)


FUNCS = MatchContext.build("funcs")
MSGS = MatchContext.build("msgs")


class TestDecode:
    def test_func_pre_document(self):
        e = decode_event('{"event":"func_pre","name":"fs.open","id":42,"args":["tmp.txt","w"]}')
        assert e.payload == {
            "event": "func_pre", "name": "fs.open", "id": 42, "args": ["tmp.txt", "w"],
        }

    def test_top_level_must_be_a_map(self):
        with pytest.raises(DecodeError):
            decode_event("[]")

    def test_message_document(self):
        assert decode_event('{"type":"ping","payload":1}').payload == {
            "type": "ping", "payload": 1,
        }

    def test_malformed_json_reports_position(self):
        with pytest.raises(DecodeError) as info:
            decode_event('{"type": }')
        assert info.value.position > 0

    def test_nonstandard_constants_rejected(self):
        with pytest.raises(DecodeError):
            decode_event('{"payload": NaN}')


class TestMatchBase:
    def test_binds_argument_list(self):
        e = func_post("fs.openSync", ["tmp.txt", "w"], 9)
        got = match_base(e, et("func_post", Lit("fs.openSync"), WILD, Var("args")), "funcs")
        assert got == Subst({"args": ["tmp.txt", "w"]})

    def test_discriminator_mismatch(self):
        e = func_pre("fs.open", 1, [])
        assert match_base(e, et("cb_pre", WILD, Var("id"), WILD), "funcs") is None

    def test_tail_pattern_skips_leading_elements(self):
        e = cb_pre(42, [None, 9])
        got = match_base(e, et("cb_pre", WILD, Lit(42), Seq((WILD, Var("fd")), WILD)), "funcs")
        assert got == Subst({"fd": 9})

    def test_tail_requires_minimum_length(self):
        e = cb_pre(42, [None])
        assert match_base(
            e, et("cb_pre", WILD, Lit(42), Seq((WILD, Var("fd")), WILD)), "funcs"
        ) is None

    def test_func_post_with_return_value(self):
        e = func_post("fs.openSync", ["tmp.txt", "w"], 9)
        got = match_base(
            e, et("func_post", Var("name"), WILD, Var("args"), Lit(9)), "funcs"
        )
        assert got == Subst({"name": "fs.openSync", "args": ["tmp.txt", "w"]})

    def test_three_argument_form_ignores_return(self):
        e = func_post("fs.openSync", ["tmp.txt", "w"], 9)
        assert match_base(e, et("func_post", Lit("fs.openSync"), WILD, WILD), "funcs") == Subst()

    def test_missing_field_only_matches_wildcard(self):
        bare = decode_event('{"event":"func_post","name":"f","id":1,"args":[]}')
        assert match_base(bare, et("func_post", WILD, WILD, WILD, WILD), "funcs") == Subst()
        assert match_base(bare, et("func_post", WILD, WILD, WILD, Var("r")), "funcs") is None

    def test_repeated_variable_must_agree(self):
        e = decode_event('{"event":"func_pre","name":"f","id":7,"args":[7]}')
        got = match_base(e, et("func_pre", WILD, Var("x"), Seq((Var("x"),))), "funcs")
        assert got == Subst({"x": 7})
        e2 = decode_event('{"event":"func_pre","name":"f","id":7,"args":[8]}')
        assert match_base(e2, et("func_pre", WILD, Var("x"), Seq((Var("x"),))), "funcs") is None

    def test_msg_domain(self):
        assert match_base(msg("ping", 1), et("msg", Lit("ping"), Var("p")), "msgs") == Subst(
            {"p": 1}
        )
        assert match_base(msg("pong", 1), et("msg", Lit("ping"), Var("p")), "msgs") is None


class TestMatchDerived:
    WRITE_CTX = MatchContext.build(
        "funcs",
        [
            TypeClause(
                et("write", Var("ID"), Var("FD")),
                et("func_pre", Lit("fs.write"), Var("ID"), Seq((Var("FD"),), WILD)),
            ),
            TypeClause(et("cb", Var("ID")), et("cb_pre", WILD, Var("ID"), WILD)),
        ],
    )
    PING_CTX = MatchContext.build(
        "msgs",
        [
            TypeClause(
                et("ping", Var("P"), Var("PREV")),
                et("msg", Lit("ping"), Var("P")),
                (Guard(">", Var("P"), Var("PREV")),),
            ),
        ],
    )

    def test_clause_rewrites_to_base(self):
        e = func_pre("fs.write", 43, [9, "hello"])
        got = match(e, et("write", Var("id2"), Var("fd")), self.WRITE_CTX)
        assert got == Subst({"id2": 43, "fd": 9})

    def test_literal_argument_constrains_base_field(self):
        e = func_pre("fs.write", 43, [9, "hello"])
        assert match(e, et("write", Var("id2"), Lit(9)), self.WRITE_CTX) == Subst({"id2": 43})
        assert match(e, et("write", Var("id2"), Lit(8)), self.WRITE_CTX) is None

    def test_guard_strictly_greater(self):
        assert match(msg("ping", 1), et("ping", Var("v1"), Lit(0)), self.PING_CTX) == Subst(
            {"v1": 1}
        )
        assert match(msg("ping", 1), et("ping", Var("v1"), Lit(1)), self.PING_CTX) is None

    def test_ordering_guard_on_non_number_fails_the_clause(self):
        assert match(msg("ping", "high"), et("ping", Var("v1"), Lit(0)), self.PING_CTX) is None

    def test_derived_on_derived(self):
        ctx = MatchContext.build(
            "funcs",
            [
                TypeClause(et("cb", Var("ID")), et("cb_pre", WILD, Var("ID"), WILD)),
                TypeClause(et("done", Var("K")), et("cb", Var("K"))),
            ],
        )
        assert match(cb_pre(5, []), et("done", Var("k")), ctx) == Subst({"k": 5})

    def test_clause_order_is_deterministic(self):
        e = cb_pre(42, [None, 9])
        for _ in range(3):
            assert match(e, et("cb", Var("id")), self.WRITE_CTX) == Subst({"id": 42})


class TestMatchDispatch:
    def test_unknown_type_name(self):
        with pytest.raises(UnknownTypeName):
            match(msg("ping", 1), et("foo", Var("x")), MSGS)

    def test_unknown_arity_of_known_name(self):
        with pytest.raises(UnknownTypeName):
            match(msg("ping", 1), et("msg", Var("x")), MSGS)


# --- cross-cutting invariants ----------------------------------------------

def _corpus():
    at = load_fixture_program("at_async.texp")
    pp = load_fixture_program("pp_pingpong.texp")
    at_events = [
        func_pre("fs.open", 42, ["tmp.txt", "w", "<fn>"]),
        cb_pre(42, [None, 9]),
        func_pre("fs.write", 43, [9, "hello", "<fn>"]),
        func_pre("fs.close", 44, [9, "<fn>"]),
        cb_pre(43, [None]),
    ]
    pp_events = [msg("ping", 1), msg("pong", 2), msg("ping", 0)]
    at_types = [et("open", Var("id")), et("write", Var("id"), Var("fd")),
                et("close", Var("id"), Var("fd")), et("cb", Var("id")),
                et("cb", Var("id"), Var("fd"))]
    pp_types = [et("ping", Var("p"), Lit(0)), et("pong", Var("p"), Lit(1))]
    yield at.match_context(), at_events, at_types
    yield pp.match_context(), pp_events, pp_types


def test_domain_exactness():
    """Whenever match succeeds its domain is exactly vars_of(t); on
    failure nothing escapes."""
    for ctx, events, types in _corpus():
        for e in events:
            for t in types:
                got = match(e, t, ctx)
                if got is not None:
                    assert set(got) == set(vars_of(t)), (e, t)


def test_ground_stability():
    """Matching a partially instantiated type succeeds exactly when the
    plain type matches with bindings that extend it consistently."""
    for ctx, events, types in _corpus():
        for e in events:
            for t in types:
                full = match(e, t, ctx)
                if full is None:
                    continue
                for name in full:
                    narrowed = subst_type(Subst({name: full[name]}), t)
                    again = match(e, narrowed, ctx)
                    assert again is not None
                    assert again == full.without(name)


def test_every_funcs_event_matches_exactly_one_base_head():
    heads = [et("func_pre", WILD, WILD, WILD), et("func_post", WILD, WILD, WILD),
             et("cb_pre", WILD, WILD, WILD), et("cb_post", WILD, WILD, WILD)]
    events = [func_pre("f", 1, []), func_post("f", [], None),
              cb_pre(1, []), decode_event('{"event":"cb_post","name":"f","id":1,"args":[]}')]
    for e in events:
        hits = [h.head for h in heads if match(e, h, FUNCS) is not None]
        assert len(hits) == 1
