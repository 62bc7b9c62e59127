"""HTTP monitoring service.

POST ``/`` consumes one JSON event, advances the session's monitor, and
replies ``{"error": false}`` while the session is alive or
``{"error": true}`` from the first violation onward.  POST ``/final``
reports whether the consumed trace is accepted as complete; POST
``/reset`` reinitializes (or creates) a session.  An optional top-level
``"session"`` field in any request body selects the session; without
it the ``default`` session is used, so a monitored system that knows
nothing about sessions works unchanged.

Events within one session are processed strictly in arrival order;
distinct sessions may proceed in parallel.
"""

from __future__ import annotations

import json
import logging
import re
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional

from .domains import DecodeError, Event, SpecProgram
from .engine import (
    DEFAULT_FRONTIER_CAP,
    FrontierOverflow,
    MonitorState,
    accepts_final,
    initial_state,
    step,
)

logger = logging.getLogger("tracexp.service")

_SESSION_RE = re.compile(r"^[A-Za-z0-9._~-]+$")


@dataclass
class ServiceConfig:
    port: int
    spec_path: str
    frontier_cap: int = DEFAULT_FRONTIER_CAP
    log_path: Optional[str] = None

    def __post_init__(self):
        if not 1 <= self.port <= 65535:
            raise ValueError(f"port {self.port} out of range")
        if self.frontier_cap < 1:
            raise ValueError("frontier cap must be at least 1")


class _Session:
    __slots__ = ("lock", "state")

    def __init__(self, state: MonitorState):
        self.lock = threading.Lock()
        self.state = state


class MonitorService:
    """Session table plus the request handlers, independent of any
    particular HTTP stack."""

    def __init__(self, program: SpecProgram, frontier_cap: int = DEFAULT_FRONTIER_CAP):
        self.program = program
        self.ctx = program.match_context()
        self.frontier_cap = frontier_cap
        self._sessions: dict[str, _Session] = {}
        self._table_lock = threading.Lock()

    # -- session table -------------------------------------------------
    def _get_session(self, session_id: str, create: bool) -> Optional[_Session]:
        with self._table_lock:
            session = self._sessions.get(session_id)
            if session is None and create:
                session = _Session(initial_state(self.program))
                self._sessions[session_id] = session
            return session

    @staticmethod
    def _session_of(doc: dict) -> str:
        sid = doc.get("session", "default")
        if not isinstance(sid, str) or not _SESSION_RE.match(sid):
            raise DecodeError(f"invalid session id {sid!r}")
        return sid

    # -- handlers -------------------------------------------------------
    def handle_event(self, raw: bytes) -> tuple[int, bytes]:
        try:
            doc = _decode_body(raw)
            session_id = self._session_of(doc)
        except DecodeError as exc:
            return 400, _json_bytes({"error": True, "reason": exc.reason})
        session = self._get_session(session_id, create=True)
        event = Event(doc)
        with session.lock:
            try:
                session.state = step(session.state, event, self.ctx, self.frontier_cap)
            except FrontierOverflow as exc:
                logger.error("session %s: %s", session_id, exc)
                return 500, _json_bytes({"error": True, "reason": str(exc)})
            alive = session.state.alive
        return 200, _json_bytes({"error": not alive})

    def handle_final(self, raw: bytes) -> tuple[int, bytes]:
        try:
            doc = _decode_body(raw, allow_empty=True)
            session_id = self._session_of(doc)
        except DecodeError as exc:
            return 400, _json_bytes({"error": True, "reason": exc.reason})
        session = self._get_session(session_id, create=False)
        if session is None:
            return 404, _json_bytes({"reason": f"unknown session {session_id!r}"})
        with session.lock:
            accepted = accepts_final(session.state)
            events = session.state.event_count
        return 200, _json_bytes({"accepted": accepted, "events": events})

    def handle_reset(self, raw: bytes) -> tuple[int, bytes]:
        try:
            doc = _decode_body(raw, allow_empty=True)
            session_id = self._session_of(doc)
        except DecodeError as exc:
            return 400, _json_bytes({"error": True, "reason": exc.reason})
        session = self._get_session(session_id, create=True)
        with session.lock:
            session.state = initial_state(self.program)
        return 200, _json_bytes({"reset": True})


def _decode_body(raw: bytes, allow_empty: bool = False) -> dict:
    if allow_empty and not raw.strip():
        return {}
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DecodeError(f"invalid UTF-8: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DecodeError(exc.msg, exc.pos) from exc
    if not isinstance(doc, dict):
        raise DecodeError("top level of an event must be a map")
    return doc


def _json_bytes(obj: dict) -> bytes:
    return json.dumps(obj).encode("utf-8")


class _Handler(BaseHTTPRequestHandler):
    service: MonitorService  # injected by build_server
    protocol_version = "HTTP/1.1"

    def do_POST(self):  # noqa: N802  (stdlib naming)
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if self.path == "/":
            status, body = self.service.handle_event(raw)
        elif self.path == "/final":
            status, body = self.service.handle_final(raw)
        elif self.path == "/reset":
            status, body = self.service.handle_reset(raw)
        else:
            status, body = 404, _json_bytes({"reason": "not found"})
        self._reply(status, body)

    def do_GET(self):  # noqa: N802
        self._reply(405, _json_bytes({"reason": "POST only"}))

    def _reply(self, status: int, body: bytes) -> None:
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, fmt, *args):
        logger.debug("%s - %s", self.address_string(), fmt % args)


def build_server(service: MonitorService, port: int, host: str = "127.0.0.1") -> ThreadingHTTPServer:
    """Bind a threading HTTP server; port 0 picks an ephemeral port
    (read it back from ``server.server_address``)."""
    handler = type("BoundHandler", (_Handler,), {"service": service})
    return ThreadingHTTPServer((host, port), handler)


def serve(config: ServiceConfig) -> None:
    """Load the specification and serve until interrupted."""
    from .parser import parse_spec_file

    if config.log_path:
        handler = logging.FileHandler(config.log_path)
        handler.setFormatter(logging.Formatter("%(asctime)s %(name)s %(levelname)s %(message)s"))
        logging.getLogger("tracexp").addHandler(handler)
        logging.getLogger("tracexp").setLevel(logging.INFO)
    program = parse_spec_file(config.spec_path)
    for warning in program.warnings:
        logger.warning("%s", warning)
    service = MonitorService(program, config.frontier_cap)
    server = build_server(service, config.port)
    host, port = server.server_address[:2]
    logger.info("monitoring on http://%s:%s/ (spec %s)", host, port, config.spec_path)
    print(f"listening on http://{host}:{port}/", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
