"""Session state: blocks, garden, snapshot history, undo/redo, clocks.

A session is single-writer; every committed change appends exactly one
snapshot whose hash is taken over the canonical state.  Transient runtime
facts (busy flags, pending operations, logs) stay out of the hashed state so
replays and undo always converge on the same digests.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

from .core import (
    BlockOrigin,
    GestureEvent,
    LeafStatus,
    SessionSnapshot,
    TextBlock,
    canonical_hash,
)
from .errors import Busy, NothingToRedo, NothingToUndo

logger = logging.getLogger(__name__)


@dataclass
class Leaf:
    """One generated idea: short gist, full body, lifecycle status."""

    id: str
    fern_id: str
    gist: str
    full: str
    status: LeafStatus = LeafStatus.ACTIVE
    born_at: int = 0

    def to_state(self) -> dict:
        return {
            "id": self.id,
            "fern_id": self.fern_id,
            "gist": self.gist,
            "full": self.full,
            "status": self.status.value,
            "born_at": self.born_at,
        }

    @classmethod
    def from_state(cls, d: dict) -> "Leaf":
        return cls(d["id"], d["fern_id"], d["gist"], d["full"], LeafStatus(d["status"]), d["born_at"])


@dataclass
class GraftRef:
    """Reference to a leaf imported from another fern's lineage."""

    leaf_id: str
    source_fern_id: str
    full: str

    def to_state(self) -> dict:
        return {"leaf_id": self.leaf_id, "source_fern_id": self.source_fern_id, "full": self.full}

    @classmethod
    def from_state(cls, d: dict) -> "GraftRef":
        return cls(d["leaf_id"], d["source_fern_id"], d["full"])


@dataclass
class Fern:
    """A growing idea plant with dimension checkpoints of leaf pairs."""

    id: str
    seed_text: str
    dimension: str
    x: float
    y: float
    base_interval_ms: int
    leaf_ids: list[str] = field(default_factory=list)
    checkpoints: list[tuple[str, str]] = field(default_factory=list)
    grafted_history: list[GraftRef] = field(default_factory=list)
    watered_until: int | None = None
    next_due: int = 0
    planted_at: int = 0

    def __post_init__(self):
        self.x, self.y = float(self.x), float(self.y)

    def to_state(self) -> dict:
        return {
            "id": self.id,
            "seed_text": self.seed_text,
            "dimension": self.dimension,
            "x": self.x,
            "y": self.y,
            "base_interval_ms": self.base_interval_ms,
            "leaf_ids": list(self.leaf_ids),
            "checkpoints": [list(c) for c in self.checkpoints],
            "grafted_history": [g.to_state() for g in self.grafted_history],
            "watered_until": self.watered_until,
            "next_due": self.next_due,
            "planted_at": self.planted_at,
        }

    @classmethod
    def from_state(cls, d: dict) -> "Fern":
        return cls(
            id=d["id"], seed_text=d["seed_text"], dimension=d["dimension"],
            x=d["x"], y=d["y"], base_interval_ms=d["base_interval_ms"],
            leaf_ids=list(d["leaf_ids"]),
            checkpoints=[(c[0], c[1]) for c in d["checkpoints"]],
            grafted_history=[GraftRef.from_state(g) for g in d["grafted_history"]],
            watered_until=d["watered_until"], next_due=d["next_due"], planted_at=d["planted_at"],
        )


@dataclass
class PendingOp:
    """An in-flight model-backed operation awaiting its completion."""

    op_id: str
    kind: str  # "edit" | "merge"
    template_name: str
    prompt: str
    block_ids: tuple[str, ...]
    payload: dict
    generation: int
    started_at: int


class Session:
    """One user's canvas plus garden, with full snapshot history."""

    def __init__(self, session_id: str, writing_context: str | None = None):
        self.session_id = session_id
        self.writing_context = writing_context
        self.blocks: dict[str, TextBlock] = {}
        self.ferns: dict[str, Fern] = {}
        self.leaves: dict[str, Leaf] = {}
        self.counters: dict[str, int] = {"block": 0, "fern": 0, "leaf": 0}
        self.clock_ms: int = 0
        self.snapshots: list[SessionSnapshot] = []
        self.redo_stack: list[SessionSnapshot] = []
        self.trace: list[dict] = []
        self.event_log: list[GestureEvent] = []
        self.interaction_log: list[dict] = []
        self.prompt_log: list[dict] = []
        self.pending: dict[str, PendingOp] = {}
        self.generation = 0  # bumped by undo/redo to invalidate stale completions
        self._op_counter = itertools.count(1)
        snap = self.commit("session_created")
        # leading create record makes a from-birth trace self-contained
        self.trace.append({
            "t": self.clock_ms,
            "kind": "create",
            "writing_context": writing_context,
            "expected_hash": snap.hash,
        })

    # -- identifiers ---------------------------------------------------------

    def next_id(self, kind: str) -> str:
        self.counters[kind] += 1
        return f"{kind[0]}{self.counters[kind]}"

    def next_op_id(self) -> str:
        return f"op{next(self._op_counter)}"

    # -- canonical state -----------------------------------------------------

    def state_dict(self) -> dict:
        # the free-running clock stays out of the hashed state: wall time
        # advances between commits and must not drift session hashes; the
        # garden's own timers (next_due, watered_until, born_at) are state
        return {
            "writing_context": self.writing_context,
            "counters": dict(self.counters),
            "blocks": {
                b.id: {
                    "id": b.id, "text": b.text, "x": b.x, "y": b.y,
                    "w": b.w, "h": b.h, "origin": b.origin.value,
                }
                for b in self.blocks.values()
            },
            "block_order": list(self.blocks.keys()),
            "ferns": {f.id: f.to_state() for f in self.ferns.values()},
            "fern_order": list(self.ferns.keys()),
            "leaves": {l.id: l.to_state() for l in self.leaves.values()},
        }

    def restore_state(self, state: dict) -> None:
        self.writing_context = state["writing_context"]
        self.counters = dict(state["counters"])
        self.blocks = {}
        for bid in state["block_order"]:
            b = state["blocks"][bid]
            self.blocks[bid] = TextBlock(
                id=b["id"], text=b["text"], x=b["x"], y=b["y"], w=b["w"], h=b["h"],
                origin=BlockOrigin(b["origin"]),
            )
        self.ferns = {fid: Fern.from_state(state["ferns"][fid]) for fid in state["fern_order"]}
        self.leaves = {lid: Leaf.from_state(ld) for lid, ld in sorted(state["leaves"].items())}

    def current_hash(self) -> str:
        return canonical_hash(self.state_dict())

    # -- snapshots / undo / redo ----------------------------------------------

    def commit(self, cause: str) -> SessionSnapshot:
        snap = SessionSnapshot(sequence=len(self.snapshots), cause=cause, state=self.state_dict())
        self.snapshots.append(snap)
        self.redo_stack.clear()
        return snap

    def undo(self) -> SessionSnapshot:
        if self.pending:
            raise Busy("cannot undo while an operation is in flight")
        if len(self.snapshots) <= 1:
            raise NothingToUndo("already at the initial state")
        self.redo_stack.append(self.snapshots.pop())
        snap = self.snapshots[-1]
        self.restore_state(snap.state)
        self.generation += 1
        return snap

    def redo(self) -> SessionSnapshot:
        if self.pending:
            raise Busy("cannot redo while an operation is in flight")
        if not self.redo_stack:
            raise NothingToRedo("nothing to redo")
        snap = self.redo_stack.pop()
        self.snapshots.append(snap)
        self.restore_state(snap.state)
        self.generation += 1
        return snap

    # -- busy tracking ---------------------------------------------------------

    def mark_busy(self, block_ids: tuple[str, ...], op: PendingOp) -> None:
        for bid in block_ids:
            block = self.blocks.get(bid)
            if block is not None:
                block.busy = True
        self.pending[op.op_id] = op

    def clear_busy(self, op: PendingOp) -> None:
        for bid in op.block_ids:
            block = self.blocks.get(bid)
            if block is not None:
                block.busy = False
        self.pending.pop(op.op_id, None)

    def block_busy(self, block_id: str) -> bool:
        block = self.blocks.get(block_id)
        return bool(block and block.busy)

    # -- logging ----------------------------------------------------------------

    def log_interaction(self, event_kind: str, target: str | None, outcome: str, latency_ms: int = 0) -> dict:
        entry = {
            "t": self.clock_ms,
            "session_id": self.session_id,
            "event_kind": event_kind,
            "target": target,
            "outcome": outcome,
            "latency_ms": latency_ms,
        }
        self.interaction_log.append(entry)
        return entry

    def log_prompt(self, template_name: str, prompt: str) -> None:
        self.prompt_log.append({"t": self.clock_ms, "template": template_name, "prompt": prompt})
