"""Command-line interface.

``tracexp replay`` checks a recorded JSONL trace against a
specification (exit 0 = accepted or still alive, 1 = violated,
2 = load/decode errors); ``tracexp serve`` runs the HTTP monitor;
``tracexp fmt`` reprints a specification in canonical form.
"""

from __future__ import annotations

import argparse
import json
import sys

from .engine import DEFAULT_FRONTIER_CAP, FrontierOverflow
from .oracle import BoundExceeded, DEFAULT_LENGTH_BOUND, oracle_accepts
from .parser import SpecLoadError, format_spec, parse_spec_file
from .replay import (
    TraceDecodeError,
    VIOLATED,
    enumerate_accepted,
    load_trace,
    replay_events,
)
from .service import ServiceConfig, serve


def _fail(message: str, code: int = 2) -> int:
    print(message, file=sys.stderr)
    return code


def _cmd_replay(args) -> int:
    try:
        program = parse_spec_file(args.spec)
    except OSError as exc:
        return _fail(f"cannot read specification: {exc}")
    except SpecLoadError as exc:
        for diag in exc.diagnostics:
            print(f"{args.spec}:{diag}", file=sys.stderr)
        return 2
    for warning in program.warnings:
        print(f"{args.spec}:{warning}", file=sys.stderr)

    if args.trace is None and not args.enumerate:
        return _fail("a trace file is required unless --enumerate is given")

    code = 0
    if args.trace is not None:
        try:
            events = load_trace(args.trace)
        except OSError as exc:
            return _fail(f"cannot read trace: {exc}")
        except TraceDecodeError as exc:
            return _fail(str(exc))
        try:
            report = replay_events(program, events, args.frontier_cap)
        except FrontierOverflow as exc:
            return _fail(str(exc))
        if args.json:
            print(json.dumps(report.to_json_dict()))
        else:
            if report.verdict == VIOLATED:
                print(f"verdict: violated at event {report.violated_at}")
            else:
                print(f"verdict: {report.verdict}")
            print(f"events: {report.events}")
            if report.frontier_sizes:
                print(f"max frontier: {max(report.frontier_sizes)}")
        if args.oracle:
            try:
                truth = oracle_accepts(program, events, args.oracle_bound)
            except BoundExceeded as exc:
                return _fail(str(exc))
            agrees = truth == (report.verdict == "accepted")
            print(f"oracle: {'accepted' if truth else 'rejected'}"
                  f" ({'agrees' if agrees else 'DISAGREES'})")
        if args.report_dir:
            from .report import write_report

            paths = write_report(report, args.report_dir)
            for kind, path in sorted(paths.items()):
                print(f"report {kind}: {path}")
        if report.verdict == VIOLATED:
            code = 1

    if args.enumerate:
        try:
            alphabet = load_trace(args.enumerate)
        except (OSError, TraceDecodeError) as exc:
            return _fail(f"cannot read alphabet: {exc}")
        traces = enumerate_accepted(program, alphabet, args.max_len, args.frontier_cap)
        for trace in traces:
            print(json.dumps([alphabet[i].payload for i in trace]))
    return code


def _cmd_serve(args) -> int:
    try:
        config = ServiceConfig(
            port=args.port,
            spec_path=args.spec,
            frontier_cap=args.frontier_cap,
            log_path=args.log,
        )
    except ValueError as exc:
        return _fail(str(exc))
    try:
        serve(config)
    except SpecLoadError as exc:
        for diag in exc.diagnostics:
            print(f"{args.spec}:{diag}", file=sys.stderr)
        return 2
    except OSError as exc:
        return _fail(str(exc))
    return 0


def _cmd_fmt(args) -> int:
    try:
        program = parse_spec_file(args.spec)
    except OSError as exc:
        return _fail(f"cannot read specification: {exc}")
    except SpecLoadError as exc:
        for diag in exc.diagnostics:
            print(f"{args.spec}:{diag}", file=sys.stderr)
        return 2
    sys.stdout.write(format_spec(program))
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tracexp",
        description="Monitor event traces against trace-expression specifications.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    replay = sub.add_parser("replay", help="check a recorded JSONL trace offline")
    replay.add_argument("spec", help="specification file (.texp)")
    replay.add_argument("trace", nargs="?", default=None, help="JSONL trace file")
    replay.add_argument("--oracle", action="store_true",
                        help="also run the backtracking oracle and compare")
    replay.add_argument("--oracle-bound", type=int, default=DEFAULT_LENGTH_BOUND,
                        help="maximum trace length for --oracle")
    replay.add_argument("--enumerate", metavar="ALPHABET_JSONL",
                        help="print all accepted traces over this alphabet")
    replay.add_argument("--max-len", type=int, default=4,
                        help="maximum trace length for --enumerate")
    replay.add_argument("--frontier-cap", type=int, default=DEFAULT_FRONTIER_CAP)
    replay.add_argument("--json", action="store_true",
                        help="emit the replay report as a JSON document")
    replay.add_argument("--report-dir", metavar="DIR",
                        help="write a CSV table and a frontier-size figure here")
    replay.set_defaults(func=_cmd_replay)

    serve_p = sub.add_parser("serve", help="run the HTTP monitoring service")
    serve_p.add_argument("--port", type=int, required=True)
    serve_p.add_argument("--spec", required=True, help="specification file (.texp)")
    serve_p.add_argument("--frontier-cap", type=int, default=DEFAULT_FRONTIER_CAP)
    serve_p.add_argument("--log", default=None, help="append service logs to this file")
    serve_p.set_defaults(func=_cmd_serve)

    fmt = sub.add_parser("fmt", help="reprint a specification in canonical form")
    fmt.add_argument("spec", help="specification file (.texp)")
    fmt.set_defaults(func=_cmd_fmt)
    return parser


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
