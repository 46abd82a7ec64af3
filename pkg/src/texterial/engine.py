"""Gesture routing and trace recording on top of the clay and garden ops.

``submit`` validates an event and either completes it inline (pure ops) or
returns a pending model-backed operation; ``finish`` runs the provider and
commits.  ``apply_event`` chains the two for synchronous callers such as
tests and the replay harness.  Every committed change appends one trace
record carrying the snapshot hash, which is what replay verifies.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from . import clay, garden
from .config import EngineConfig
from .core import BlockOrigin, GestureEvent, GestureKind
from .errors import NoTarget, TexterialError
from .gateway import CompletionRequest, complete, complete_seed_dimension
from .prompts import Template
from .session import PendingOp, Session

logger = logging.getLogger(__name__)


@dataclass
class Outcome:
    """Result of one fully-applied event."""

    kind: str
    committed: bool
    block_id: str | None = None
    fern_id: str | None = None
    leaf_ids: list[str] = field(default_factory=list)
    diff: dict | None = None
    detail: dict = field(default_factory=dict)


def record_commit(session: Session, kind: str, event: GestureEvent | None = None,
                  t: int | None = None) -> None:
    if not session.snapshots:
        return
    # undo/redo rewind the session clock as part of the restored state, so
    # they pass the invocation time explicitly to keep the trace ordered
    rec: dict = {"t": session.clock_ms if t is None else t, "kind": kind,
                 "expected_hash": session.snapshots[-1].hash}
    if event is not None:
        rec["event"] = event.to_dict()
    session.trace.append(rec)


def _leaf_drop_zone(session: Session, event: GestureEvent, cfg: EngineConfig) -> tuple[str, str | None]:
    """Classify where a leaf was dropped: another fern, the soil, or away."""
    x, y, _ = event.points[-1]
    leaf = session.leaves.get(event.target or "")
    for fern in session.ferns.values():
        if leaf is not None and fern.id == leaf.fern_id:
            continue
        half_w = cfg.garden.fern_half_width
        if (fern.x - half_w <= x <= fern.x + half_w
                and fern.y - cfg.garden.fern_height <= y <= fern.y):
            return ("fern", fern.id)
    if y >= cfg.garden.soil_y:
        return ("soil", None)
    return ("away", None)


def submit(session: Session, event: GestureEvent, provider, cfg: EngineConfig):
    """Apply an event; returns an Outcome, a PendingOp, or None for no-ops."""
    session.event_log.append(event)
    kind = event.kind

    if kind in clay.EDIT_TEMPLATES:
        return clay.prepare_local_edit(session, event, cfg)

    if kind is GestureKind.DRAG_BLOCK:
        result = clay.prepare_merge(session, event, cfg)
        if isinstance(result, PendingOp):
            return result
        _, block = result
        session.log_interaction("drag_block", block.id, "moved")
        return Outcome(kind="moved", committed=True, block_id=block.id)

    if kind is GestureKind.RIP:
        left, right = clay.rip_block(session, event, cfg)
        session.log_interaction("rip", event.target, f"split:{left.id},{right.id}")
        return Outcome(kind="rip", committed=True, detail={"left": left.id, "right": right.id})

    if kind is GestureKind.VOICE_UTTERANCE:
        if not event.payload:
            raise NoTarget("voice utterance carries no transcript")
        if event.points:
            x, y, _ = event.points[0]
        else:
            x, y = cfg.clay.voice_drop_x, cfg.clay.voice_drop_y
        block = clay.add_block(session, event.payload, x, y, BlockOrigin.VOICE, cfg)
        session.log_interaction("voice_utterance", block.id, "added")
        return Outcome(kind="add_block", committed=True, block_id=block.id)

    if kind is GestureKind.PLANT_PRESS:
        if not event.payload:
            raise NoTarget("planting requires a transcript")
        x, y, _ = event.points[0]
        return garden.prepare_plant(session, event.payload, x, y)

    if kind is GestureKind.WATER_LINE:
        stroke = [(p[0], p[1]) for p in event.points]
        ids = garden.water(session, stroke, cfg)
        session.log_interaction("water_line", None, f"watered:{len(ids)}")
        return Outcome(kind="water", committed=bool(ids), detail={"fern_ids": ids})

    if kind is GestureKind.PRESERVE_HOLD:
        leaf = garden.preserve(session, event.target)
        session.log_interaction("preserve_hold", leaf.id, leaf.status.value)
        return Outcome(kind="preserve", committed=True, leaf_ids=[leaf.id])

    if kind is GestureKind.EDIT_LEAF:
        gist, full = _parse_leaf_edit(event.payload)
        leaf = garden.edit_leaf(session, event.target, gist=gist, full=full)
        session.log_interaction("edit_leaf", leaf.id, "edited")
        return Outcome(kind="edit_leaf", committed=True, leaf_ids=[leaf.id])

    if kind is GestureKind.PLUCK_LEAF:
        session.log_interaction("pluck_leaf", event.target, "held")
        return None

    if kind is GestureKind.DROP_LEAF:
        return _drop_leaf(session, event, provider, cfg)

    raise ValueError(f"unroutable gesture kind {kind}")  # pragma: no cover


def _parse_leaf_edit(payload: str | None) -> tuple[str | None, str | None]:
    if not payload:
        return None, None
    try:
        obj = json.loads(payload)
        if isinstance(obj, dict):
            return obj.get("gist"), obj.get("full")
    except json.JSONDecodeError:
        pass
    return None, payload


def _drop_leaf(session: Session, event: GestureEvent, provider, cfg: EngineConfig):
    zone, fern_id = _leaf_drop_zone(session, event, cfg)
    x, y, _ = event.points[-1]
    if zone == "fern":
        fern = garden.graft(session, event.target, fern_id)
        session.log_interaction("drop_leaf", event.target, f"grafted:{fern.id}")
        return Outcome(kind="graft", committed=True, fern_id=fern.id, leaf_ids=[event.target])
    if zone == "soil":
        group = _compost_group(event)
        if group:
            return garden.prepare_compost(session, group, x, y)
        fern = garden.replant_leaf(session, event.target, x, y, cfg)
        session.log_interaction("drop_leaf", event.target, f"replanted:{fern.id}")
        return Outcome(kind="replant", committed=True, fern_id=fern.id, leaf_ids=[event.target])
    leaf = garden.prune(session, event.target)
    session.log_interaction("drop_leaf", leaf.id, "pruned")
    return Outcome(kind="prune", committed=True, leaf_ids=[leaf.id])


def _compost_group(event: GestureEvent) -> list[str] | None:
    if not event.payload:
        return None
    try:
        obj = json.loads(event.payload)
    except json.JSONDecodeError:
        return None
    if isinstance(obj, dict) and isinstance(obj.get("leaves"), list) and len(obj["leaves"]) >= 2:
        return [str(x) for x in obj["leaves"]]
    return None


Pending = PendingOp | garden.SeedJob


def resolve(op: Pending, provider):
    """Run the provider side of a pending operation (no session access).

    Services call this outside the session lock so readers never wait on
    model latency; the paired apply_resolved mutates under the lock.
    """
    if isinstance(op, garden.SeedJob):
        req = CompletionRequest(op.prompt, op.template, op.op_id)
        return complete_seed_dimension(provider, req)
    req = CompletionRequest(op.prompt, Template.from_name(op.template_name), op.op_id)
    return complete(provider, req)


def apply_resolved(session: Session, op: Pending, resolved, cfg: EngineConfig) -> Outcome:
    """Commit a resolved completion to the session."""
    if isinstance(op, garden.SeedJob):
        if op.kind == "plant":
            fern = garden.finish_plant(session, op, resolved, cfg)
            session.log_interaction("plant_press", fern.id, "planted")
        else:
            fern = garden.finish_compost(session, op, resolved, cfg)
            session.log_interaction("drop_leaf", op.leaf_ids[0], f"composted:{fern.id}")
        return Outcome(kind=op.kind, committed=True, fern_id=fern.id, leaf_ids=list(op.leaf_ids))
    started = op.started_at
    if op.kind == "edit":
        block, diff = clay.finish_local_edit(session, op, resolved, cfg)
    else:
        block, diff = clay.finish_merge(session, op, resolved, cfg)
    latency = session.clock_ms - started
    session.log_interaction(op.payload.get("gesture", op.kind), block.id, "completed", latency)
    return Outcome(kind=op.kind, committed=True, block_id=block.id, diff=diff.to_dict())


def fail_pending(session: Session, op: Pending, error: Exception) -> None:
    """Undo the staging effects of a pending operation after a failure."""
    if isinstance(op, garden.SeedJob):
        session.log_interaction(op.kind, op.leaf_ids[0] if op.leaf_ids else None,
                                f"failed:{type(error).__name__}")
        return
    clay.fail_op(session, op, error)


def finish(session: Session, op: Pending, provider, cfg: EngineConfig) -> Outcome:
    """Run the provider for a pending op and commit its effect."""
    try:
        resolved = resolve(op, provider)
        return apply_resolved(session, op, resolved, cfg)
    except TexterialError as exc:
        fail_pending(session, op, exc)
        raise


def apply_event(session: Session, event: GestureEvent, provider, cfg: EngineConfig,
                record: bool = True) -> Outcome | None:
    """Synchronously apply one event end to end, recording its trace entry."""
    result = submit(session, event, provider, cfg)
    if isinstance(result, (PendingOp, garden.SeedJob)):
        outcome = finish(session, result, provider, cfg)
    else:
        outcome = result
    if record and outcome is not None and outcome.committed:
        record_commit(session, "gesture", event)
    return outcome


def run_tick(session: Session, provider, cfg: EngineConfig, record: bool = True) -> list[dict]:
    """Garden clock hook: grow all due ferns and trace the result."""
    grown = garden.tick(session, provider, cfg)
    if record and grown:
        record_commit(session, "clock")
    return grown


def do_undo(session: Session, record: bool = True):
    invoked_at = session.clock_ms
    snap = session.undo()
    if record:
        record_commit(session, "undo", t=invoked_at)
    return snap


def do_redo(session: Session, record: bool = True):
    invoked_at = session.clock_ms
    snap = session.redo()
    if record:
        record_commit(session, "redo", t=invoked_at)
    return snap
