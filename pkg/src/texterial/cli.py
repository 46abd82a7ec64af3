"""Command line entry points: serve, replay, export."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import EngineConfig
from .core import canonical_json
from .errors import CorruptFile, HashMismatch, TexterialError, TraceParseError
from .gateway import MockProvider
from .persistence import load_session
from .session import Session
from .trace import parse_trace, replay


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="texterial",
                                     description="Text-as-material gesture engine")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the session HTTP/SSE service")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--provider", choices=["mock", "live"], default=None,
                       help="override TEXTERIAL_PROVIDER")
    serve.add_argument("--data", default="./data", help="session data directory")
    serve.add_argument("--clock", choices=["wall", "simulated"], default="wall")

    rep = sub.add_parser("replay", help="replay a trace against a seed session")
    rep.add_argument("trace", help="trace JSONL path")
    rep.add_argument("--seed", default=None, help="seed session file (default: fresh session)")
    rep.add_argument("--strict", action="store_true",
                     help="require an expected hash on every record")

    exp = sub.add_parser("export", help="export a persisted session as canonical JSON")
    exp.add_argument("session_id")
    exp.add_argument("--data", default="./data")
    exp.add_argument("--out", required=True)
    return parser


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    cfg = EngineConfig.from_env()
    if args.provider:
        cfg = cfg.with_provider(provider=args.provider)
    app = create_app(cfg, data_dir=args.data, clock_mode=args.clock)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _cmd_replay(args) -> int:
    try:
        lines = Path(args.trace).read_text(encoding="utf-8").splitlines()
        records = parse_trace(lines)
    except OSError as exc:
        print(f"cannot read trace: {exc}", file=sys.stderr)
        return 2
    except TraceParseError as exc:
        print(f"trace parse error (line {exc.line_number}): {exc}", file=sys.stderr)
        return 2

    if args.seed:
        try:
            session = load_session(args.seed)
        except (OSError, CorruptFile) as exc:
            print(f"cannot load seed session: {exc}", file=sys.stderr)
            return 2
    else:
        session = Session("replay")

    try:
        report = replay(records, session, MockProvider(), EngineConfig(), strict=args.strict)
    except HashMismatch as exc:
        print(f"HASH MISMATCH at record {exc.record_index}: {exc}", file=sys.stderr)
        return 1
    except TexterialError as exc:
        print(f"replay failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(f"records applied: {report.records_applied}")
    print(f"hashes verified: {report.hashes_checked}")
    print(f"final hash: {report.final_hash}")
    return 0


def _cmd_export(args) -> int:
    path = Path(args.data) / f"{args.session_id}.json"
    try:
        session = load_session(path)
    except (OSError, CorruptFile) as exc:
        print(f"cannot export: {exc}", file=sys.stderr)
        return 2
    doc = {
        "format": "texterial-session",
        "version": 1,
        "session_id": args.session_id,
        "digest": session.snapshots[-1].hash,
        "state": session.state_dict(),
    }
    Path(args.out).write_text(canonical_json(doc), encoding="utf-8")
    print(f"exported {args.session_id} -> {args.out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = _build_parser().parse_args(argv)
    if args.command == "serve":
        return _cmd_serve(args)
    if args.command == "replay":
        return _cmd_replay(args)
    if args.command == "export":
        return _cmd_export(args)
    return 2  # pragma: no cover


if __name__ == "__main__":
    sys.exit(main())
