"""Interaction trace records and the deterministic replay harness.

A trace is JSONL: each record carries the session-relative time, the event
(or clock tick / undo / redo marker) and optionally the state hash expected
after the commit.  Replaying against the mock provider must reproduce every
hash; the first mismatch aborts with its record index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .config import EngineConfig
from .core import GestureEvent
from .engine import apply_event, do_redo, do_undo, run_tick
from .errors import HashMismatch, TraceParseError
from .session import Session

RECORD_KINDS = ("create", "gesture", "clock", "undo", "redo")


@dataclass(frozen=True)
class TraceRecord:
    t: int
    kind: str
    event: GestureEvent | None = None
    expected_hash: str | None = None
    writing_context: str | None = None

    def to_dict(self) -> dict:
        d: dict = {"t": self.t, "kind": self.kind}
        if self.event is not None:
            d["event"] = self.event.to_dict()
        if self.expected_hash is not None:
            d["expected_hash"] = self.expected_hash
        if self.kind == "create":
            d["writing_context"] = self.writing_context
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TraceRecord":
        kind = d.get("kind")
        if kind not in RECORD_KINDS:
            raise ValueError(f"unknown trace record kind {kind!r}")
        event = GestureEvent.from_dict(d["event"]) if "event" in d else None
        if kind == "gesture" and event is None:
            raise ValueError("gesture record lacks an event")
        return cls(t=int(d["t"]), kind=kind, event=event,
                   expected_hash=d.get("expected_hash"),
                   writing_context=d.get("writing_context"))


def parse_trace(lines) -> list[TraceRecord]:
    records = []
    for i, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            records.append(TraceRecord.from_dict(json.loads(line)))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise TraceParseError(f"bad trace record on line {i}: {exc}", line_number=i) from exc
    if any(b.t < a.t for a, b in zip(records, records[1:])):
        raise TraceParseError("trace records are not ordered by t", line_number=0)
    return records


def dump_trace(session: Session) -> str:
    return "\n".join(json.dumps(rec, ensure_ascii=False) for rec in session.trace) + ("\n" if session.trace else "")


@dataclass
class ReplayReport:
    final_hash: str
    records_applied: int = 0
    hashes_checked: int = 0
    failures: list[str] = field(default_factory=list)


def replay(records: list[TraceRecord], session: Session, provider,
           cfg: EngineConfig, strict: bool = False) -> ReplayReport:
    """Apply records in order under a scripted clock, verifying hashes."""
    report = ReplayReport(final_hash=session.current_hash())
    for index, rec in enumerate(records):
        session.clock_ms = rec.t
        if rec.kind == "create":
            # re-baseline: a from-birth trace carries the session context
            session.writing_context = rec.writing_context
            session.snapshots.clear()
            session.redo_stack.clear()
            session.commit("session_created")
        elif rec.kind == "gesture":
            apply_event(session, rec.event, provider, cfg, record=False)
        elif rec.kind == "clock":
            run_tick(session, provider, cfg, record=False)
        elif rec.kind == "undo":
            do_undo(session, record=False)
        elif rec.kind == "redo":
            do_redo(session, record=False)
        report.records_applied += 1
        actual = session.snapshots[-1].hash
        if rec.expected_hash is not None:
            report.hashes_checked += 1
            if actual != rec.expected_hash:
                raise HashMismatch(
                    f"record {index}: expected {rec.expected_hash[:12]}…, got {actual[:12]}…",
                    record_index=index,
                )
        elif strict:
            raise HashMismatch(f"record {index} lacks expected_hash (strict mode)", record_index=index)
    report.final_hash = session.current_hash()
    return report
