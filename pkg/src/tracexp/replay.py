"""Offline checking: replay a recorded trace against a specification,
enumerate the accepted traces over a finite alphabet, and expose the
search-based oracle for cross-checking.

Trace files are JSONL: one JSON event per line, blank lines ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .domains import DecodeError, Event, SpecProgram, decode_event
from .engine import (
    DEFAULT_FRONTIER_CAP,
    MonitorState,
    accepts_final,
    initial_state,
    step,
)

ACCEPTED = "accepted"
PREFIX_ALIVE = "prefix_alive"
VIOLATED = "violated"


@dataclass
class ReplayReport:
    """Outcome of replaying one trace: the final verdict, the number of
    events consumed, and the frontier size after each event."""

    verdict: str
    violated_at: Optional[int]
    events: int
    frontier_sizes: list[int] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "violated_at": self.violated_at,
            "events": self.events,
            "frontier_sizes": list(self.frontier_sizes),
        }


class TraceDecodeError(ValueError):
    """A trace file line failed to decode."""

    def __init__(self, path, line_no: int, reason: str):
        super().__init__(f"{path}:{line_no}: {reason}")
        self.path = path
        self.line_no = line_no
        self.reason = reason


def load_trace(path) -> list[Event]:
    events: list[Event] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                events.append(decode_event(line))
            except DecodeError as exc:
                raise TraceDecodeError(path, line_no, exc.reason) from exc
    return events


def replay_events(
    program: SpecProgram,
    events,
    cap: int = DEFAULT_FRONTIER_CAP,
) -> ReplayReport:
    ctx = program.match_context()
    state = initial_state(program)
    sizes: list[int] = []
    for event in events:
        state = step(state, event, ctx, cap)
        sizes.append(len(state.frontier))
    if not state.alive:
        verdict = VIOLATED
    elif accepts_final(state):
        verdict = ACCEPTED
    else:
        verdict = PREFIX_ALIVE
    return ReplayReport(
        verdict=verdict,
        violated_at=state.violated_at,
        events=state.event_count,
        frontier_sizes=sizes,
    )


def replay_files(spec_path, trace_path, cap: int = DEFAULT_FRONTIER_CAP) -> ReplayReport:
    from .parser import parse_spec_file

    program = parse_spec_file(spec_path)
    events = load_trace(trace_path)
    return replay_events(program, events, cap)


def enumerate_accepted(
    program: SpecProgram,
    alphabet: list[Event],
    max_len: int,
    cap: int = DEFAULT_FRONTIER_CAP,
) -> list[tuple[int, ...]]:
    """All accepted traces over the alphabet with length <= max_len, as
    tuples of alphabet indices in length-then-lexicographic order.
    Violated prefixes are pruned: the verdict is sticky, so none of
    their extensions can be accepted."""
    ctx = program.match_context()
    out: list[tuple[int, ...]] = []
    start = initial_state(program)
    if accepts_final(start):
        out.append(())
    layer: list[tuple[tuple[int, ...], MonitorState]] = [((), start)]
    for _ in range(max_len):
        nxt: list[tuple[tuple[int, ...], MonitorState]] = []
        for prefix, state in layer:
            for idx, event in enumerate(alphabet):
                advanced = step(state, event, ctx, cap)
                if not advanced.alive:
                    continue
                trace = prefix + (idx,)
                if accepts_final(advanced):
                    out.append(trace)
                nxt.append((trace, advanced))
        layer = nxt
        if not layer:
            break
    return out
