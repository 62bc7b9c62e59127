from __future__ import annotations

import json
from pathlib import Path

import pytest

from tracexp import Event, load_trace, parse_spec_file

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


def load_fixture_program(name: str):
    return parse_spec_file(FIXTURES / name)


def load_fixture_trace(name: str):
    return load_trace(FIXTURES / name)


def func_post(name: str, args: list, ret, call_id: int = 0) -> Event:
    return Event({"event": "func_post", "name": name, "id": call_id, "args": args, "ret": ret})


def func_pre(name: str, call_id: int, args: list) -> Event:
    return Event({"event": "func_pre", "name": name, "id": call_id, "args": args})


def cb_pre(call_id: int, args: list, name: str = "<anonymous>@app.js:1") -> Event:
    return Event({"event": "cb_pre", "name": name, "id": call_id, "args": args})


def msg(kind: str, payload) -> Event:
    return Event({"type": kind, "payload": payload})


def write_jsonl(path: Path, events: list[Event]) -> Path:
    with open(path, "w", encoding="utf-8") as fh:
        for event in events:
            fh.write(json.dumps(event.payload) + "\n")
    return path
