"""Acceptance suite: every exit criterion at its stated tolerance,
one printed pass/fail line per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

import itertools
import random
import time
from contextlib import contextmanager

import pytest
import specgen
from conftest import (
    FIXTURES,
    load_fixture_program,
    load_fixture_trace,
)

from tracexp import (
    EventType,
    Lit,
    accepts_final,
    enumerate_accepted,
    format_spec,
    graph_equal,
    initial_state,
    oracle_accepts,
    parse_spec,
    replay_events,
    step,
)
from tracexp.terms import REF, SHUFFLE, UNION


@contextmanager
def criterion(label: str):
    try:
        yield
    except BaseException:
        print(f"FAIL: {label}")
        raise
    print(f"PASS: {label}")


def test_synchronous_protocol_verdicts():
    """Single-file discipline: exact verdicts for the five canonical
    traces, all inside one second."""
    with criterion("synchronous protocol exact verdicts in < 1 s"):
        prog = load_fixture_program("t_sync.texp")
        started = time.perf_counter()
        cases = [
            ("t_empty.jsonl", "accepted", None),
            ("t_open_close.jsonl", "accepted", None),
            ("t_open_write2_close.jsonl", "accepted", None),
            ("t_write_only.jsonl", "violated", 1),
            ("t_write_after_close.jsonl", "violated", 3),
        ]
        for trace_name, verdict, violated_at in cases:
            report = replay_events(prog, load_fixture_trace(trace_name))
            assert (report.verdict, report.violated_at) == (verdict, violated_at), trace_name
        assert time.perf_counter() - started < 1.0


def test_parametric_frontier_specialization():
    """After two open returns (descriptors 9 and 10) the frontier is
    exactly the shuffle of both specialized write loops with the
    untouched recursive component, and the interleaved session is
    accepted."""
    with criterion("parametric open/open frontier is PW1 | PW2 | PT; interleaving accepted"):
        prog = load_fixture_program("pt_param.texp")
        ctx = prog.match_context()
        trace = load_fixture_trace("pt_interleaved.jsonl")
        state = initial_state(prog)
        state = step(state, trace[0], ctx)
        state = step(state, trace[1], ctx)
        assert len(state.frontier) == 1
        (term,) = state.frontier
        assert term.kind == SHUFFLE and term.right.kind == SHUFFLE
        pw1, pw2, pt = term.left, term.right.left, term.right.right
        assert pt.kind == REF and pt.cell is prog.equations["PT"]
        for pw, fd in ((pw1, 9), (pw2, 10)):
            body = pw.cell.body
            assert body.kind == UNION
            assert body.left.etype == EventType("write", (Lit(fd),))
            assert body.left.left.cell is pw.cell
            assert body.right.etype == EventType("close", (Lit(fd),))
            assert body.right.left.kind == "eps"

        report = replay_events(prog, trace)
        assert report.verdict == "accepted"


def test_asynchronous_callback_coupling():
    with criterion("async double write violated at event 4; corrected trace accepted"):
        prog = load_fixture_program("at_async.texp")
        bad = replay_events(prog, load_fixture_trace("at_double_write.jsonl"))
        assert (bad.verdict, bad.violated_at) == ("violated", 4)
        good = replay_events(prog, load_fixture_trace("at_corrected.jsonl"))
        assert good.verdict == "accepted"


def test_ping_pong_payload_ordering():
    with criterion("ping-pong violated at event 4; increasing payloads stay alive for 20"):
        prog = load_fixture_program("pp_pingpong.texp")
        bad = replay_events(prog, load_fixture_trace("pp_violation.jsonl"))
        assert (bad.verdict, bad.violated_at) == ("violated", 4)
        long_run = replay_events(prog, load_fixture_trace("pp_increasing20.jsonl"))
        assert long_run.events == 20
        assert long_run.verdict == "prefix_alive"
        assert long_run.violated_at is None


def _engine_verdicts(prog, max_len):
    ctx = prog.match_context()
    start = initial_state(prog)
    verdicts = {(): accepts_final(start)}
    layer = {(): start}
    for _ in range(max_len):
        grown = {}
        for prefix, state in layer.items():
            for i, event in enumerate(specgen.ALPHABET):
                trace = prefix + (i,)
                advanced = step(state, event, ctx)
                verdicts[trace] = accepts_final(advanced)
                if advanced.alive:
                    grown[trace] = advanced
        layer = grown
    return verdicts


def test_oracle_equivalence_on_random_specs():
    """200 random binder-free specifications, all 121 traces of length
    <= 4 over the three-letter alphabet, zero disagreements, < 60 s."""
    with criterion("engine equals oracle on 200 random specs x all traces <= 4 in < 60 s"):
        rng = random.Random(0xA11CE)
        started = time.perf_counter()
        disagreements = []
        traces = list(specgen.all_traces(4))
        for index in range(200):
            prog = parse_spec(specgen.program_text(specgen.random_expr(rng, 4)))
            verdicts = _engine_verdicts(prog, 4)
            for trace in traces:
                want = oracle_accepts(prog, specgen.events_of(trace))
                if verdicts.get(trace, False) != want:
                    disagreements.append((index, trace))
        elapsed = time.perf_counter() - started
        assert disagreements == []
        assert elapsed < 60.0


def test_language_laws_on_random_pairs():
    """Union is set union, intersection is set intersection, and
    shuffle commutes, by enumeration to length 4 on 50 random pairs."""
    with criterion("language laws by enumeration on 50 random spec pairs"):
        rng = random.Random(0xB0B)

        def lang(expr):
            prog = parse_spec(specgen.program_text(expr))
            return set(enumerate_accepted(prog, specgen.ALPHABET, 4))

        for _ in range(50):
            e1 = specgen.random_expr(rng, 3)
            e2 = specgen.random_expr(rng, 3)
            lang1, lang2 = lang(e1), lang(e2)
            assert lang(f"({e1}) \\/ ({e2})") == lang1 | lang2, (e1, e2)
            assert lang(f"({e1}) /\\ ({e2})") == lang1 & lang2, (e1, e2)
            assert lang(f"({e1}) | ({e2})") == lang(f"({e2}) | ({e1})"), (e1, e2)


WIRE_CASES = [
    ("t_sync.texp", "t_open_write2_close.jsonl"),
    ("t_sync.texp", "t_write_only.jsonl"),
    ("t_sync.texp", "t_write_after_close.jsonl"),
    ("pt_param.texp", "pt_interleaved.jsonl"),
    ("at_async.texp", "at_double_write.jsonl"),
    ("at_async.texp", "at_corrected.jsonl"),
    ("pp_pingpong.texp", "pp_violation.jsonl"),
    ("pp_pingpong.texp", "pp_increasing20.jsonl"),
]


def test_wire_conformance():
    """For every fixture trace the service's response bodies are
    byte-identical to the flags replay derives, and a violated session
    keeps answering {"error": true}."""
    with criterion("service responses byte-identical to replay on all fixtures"):
        import json

        from tracexp.service import MonitorService

        for spec_name, trace_name in WIRE_CASES:
            prog = load_fixture_program(spec_name)
            events = load_fixture_trace(trace_name)
            report = replay_events(prog, events)
            service = MonitorService(prog)
            for i, event in enumerate(events, start=1):
                status, body = service.handle_event(json.dumps(event.payload).encode())
                assert status == 200
                failed = report.violated_at is not None and i >= report.violated_at
                assert body == (b'{"error": true}' if failed else b'{"error": false}'), (
                    spec_name, trace_name, i,
                )
            if report.violated_at is not None:
                for event in events[:2]:
                    _, body = service.handle_event(json.dumps(event.payload).encode())
                    assert body == b'{"error": true}'


def test_round_trip_and_precedence():
    """parse(format(parse(s))) reproduces every fixture graph, format is
    a fixpoint after the first print, and the precedence golden holds."""
    with criterion("spec-language round trip on all fixtures plus precedence goldens"):
        for path in sorted(FIXTURES.glob("*.texp")):
            first = load_fixture_program(path.name)
            text = format_spec(first)
            second = parse_spec(text)
            assert graph_equal(first.main_term(), second.main_term()), path.name
            for name, cell in first.equations.items():
                assert graph_equal(
                    first.store.ref(cell), second.store.ref(second.equations[name])
                ), (path.name, name)
            assert second.clauses == first.clauses, path.name
            assert format_spec(second) == text, path.name

        golden = parse_spec(
            "domain msgs;\nmain M;\n"
            "M = a : B . C \\/ D | E;\n"
            "B = eps;\nC = eps;\nD = eps;\nE = eps;\n"
            'type a matches msg("a", _);\n'
        )
        body = golden.main_term().cell.body
        # (((a : B) . C) \/ D) | E
        assert body.kind == "shuffle"
        assert body.right.cell.name == "E"
        assert body.left.kind == "or"
        assert body.left.right.cell.name == "D"
        assert body.left.left.kind == "cat"
        assert body.left.left.right.cell.name == "C"
        assert body.left.left.left.kind == "prefix"
        assert body.left.left.left.etype.head == "a"
