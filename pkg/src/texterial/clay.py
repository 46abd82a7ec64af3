"""Text-as-clay operations: block lifecycle, local sculpting edits, merge
routing by collision, ripping, and the diffs the UI animates.

Model-backed operations run in two phases so completions can arrive
asynchronously: ``prepare_*`` validates, marks blocks busy and builds the
prompt; ``finish_*`` applies the stripped response and commits a snapshot.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .config import EngineConfig
from .core import BlockOrigin, GestureEvent, GestureKind, Intensity, TextBlock
from .diffing import EditDiff, word_diff
from .errors import (
    BlankInput,
    Busy,
    DegenerateSplit,
    StaleOperation,
    UnknownBlock,
)
from .geometry import (
    CollisionKind,
    TextLayout,
    classify_collision,
    layout_text,
    pinch_influence,
    press_extent,
    rip_split_index,
    smudge_extent,
    two_finger_scope,
)
from .prompts import PromptRequest, Template, build
from .session import PendingOp, Session
from .tags import bracket_count, emit_marked, mark_lines

logger = logging.getLogger(__name__)


def block_layout(block: TextBlock, cfg: EngineConfig) -> TextLayout:
    return layout_text(block.text, block.x, block.y, block.w, cfg.geometry)


def _sized(session: Session, text: str, x: float, y: float, w: float,
           origin: BlockOrigin, cfg: EngineConfig) -> TextBlock:
    probe = layout_text(text, x, y, w, cfg.geometry)
    return TextBlock(id=session.next_id("block"), text=text, x=x, y=y,
                     w=w, h=probe.box.h, origin=origin)


def add_block(session: Session, text: str, x: float, y: float,
              origin: BlockOrigin, cfg: EngineConfig) -> TextBlock:
    """Create a block from typed or spoken text and commit a snapshot."""
    if not text or not text.strip():
        raise BlankInput("block text is blank")
    block = _sized(session, text.strip(), x, y, cfg.clay.block_width, origin, cfg)
    session.blocks[block.id] = block
    session.commit(f"add_block:{block.id}")
    return block


def _require_block(session: Session, block_id: str | None) -> TextBlock:
    if not block_id or block_id not in session.blocks:
        raise UnknownBlock(f"no block {block_id!r}")
    block = session.blocks[block_id]
    if block.busy:
        raise Busy(f"block {block_id} has an operation in flight")
    return block


def _centroid(points) -> tuple[float, float]:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return (sum(xs) / len(xs), sum(ys) / len(ys))


def _span_pairs(event: GestureEvent) -> tuple[tuple, tuple, tuple, tuple]:
    """Two-finger events carry start and end sample pairs."""
    pts = event.points
    if len(pts) < 2:
        raise ValueError(f"{event.kind.value} event needs at least two points")
    if len(pts) >= 4:
        return pts[0], pts[1], pts[-2], pts[-1]
    return pts[0], pts[1], pts[0], pts[1]


EDIT_TEMPLATES = {
    GestureKind.PRESS: (Template.SQUEEZE, "squeeze"),
    GestureKind.PINCH: (Template.PINCH, "pinch"),
    GestureKind.SMUDGE: (Template.DISTORT, "smudge"),
    GestureKind.STRETCH: (Template.STRETCH, "stretch"),
    GestureKind.SQUASH: (Template.SQUASH, "squash"),
}


def prepare_local_edit(session: Session, event: GestureEvent, cfg: EngineConfig) -> PendingOp | None:
    """Resolve the gesture's scope and intensity and build the edit prompt.

    Returns None when the gesture carries no effect (a pinch that never
    contracted), which callers log and drop.
    """
    block = _require_block(session, event.target)
    layout = block_layout(block, cfg)
    template, tag_kind = EDIT_TEMPLATES[event.kind]

    if event.kind is GestureKind.PRESS:
        center = _centroid(event.points)
        spread = max((math.hypot(p[0] - center[0], p[1] - center[1]) for p in event.points), default=0.0)
        radius = max(spread, cfg.geometry.cell_h / 2)
        start, end = press_extent(center, radius, layout)
        held_ms = event.points[-1][2] - event.points[0][2]
        intensity = Intensity(min(1.0, max(0.0, held_ms / cfg.clay.press_full_ms)))
    elif event.kind is GestureKind.PINCH:
        p1s, p2s, p1e, p2e = _span_pairs(event)
        initial = math.hypot(p1s[0] - p2s[0], p1s[1] - p2s[1])
        final = math.hypot(p1e[0] - p2e[0], p1e[1] - p2e[1])
        center = ((p1s[0] + p2s[0]) / 2, (p1s[1] + p2s[1]) / 2)
        (start, end), intensity = pinch_influence(center, initial, final, layout, cfg.geometry)
        if intensity.value == 0.0:
            session.log_interaction(event.kind.value, block.id, "ignored")
            return None
    elif event.kind is GestureKind.SMUDGE:
        path = [(p[0], p[1]) for p in event.points]
        (start, end), intensity = smudge_extent(path, layout, cfg.geometry)
    else:  # STRETCH / SQUASH
        p1s, p2s, p1e, p2e = _span_pairs(event)
        start, end = two_finger_scope((p1s[0], p1s[1]), (p2s[0], p2s[1]), layout)
        initial = math.hypot(p1s[0] - p2s[0], p1s[1] - p2s[1])
        final = math.hypot(p1e[0] - p2e[0], p1e[1] - p2e[1])
        if initial <= 0:
            raise ValueError("degenerate finger span")
        ratio = final / initial
        grow = ratio - 1.0 if event.kind is GestureKind.STRETCH else 1.0 - ratio
        intensity = Intensity(min(1.0, max(0.0, grow)))

    full_scope = layout.words and start == layout.words[0].start and end == layout.words[-1].end
    if event.kind in (GestureKind.STRETCH, GestureKind.SQUASH) and full_scope:
        slots = {"segments": block.text, "original": block.text}
    else:
        marked = emit_marked(block.text, start, end, tag_kind, bracket_count(intensity))
        slots = {"segments": marked, "original": block.text}

    prompt = build(PromptRequest(template, slots, context=session.writing_context))
    session.log_prompt(template.value, prompt)
    op = PendingOp(
        op_id=session.next_op_id(),
        kind="edit",
        template_name=template.value,
        prompt=prompt,
        block_ids=(block.id,),
        payload={"block_id": block.id, "old_text": block.text, "gesture": event.kind.value},
        generation=session.generation,
        started_at=session.clock_ms,
    )
    session.mark_busy(op.block_ids, op)
    return op


def finish_local_edit(session: Session, op: PendingOp, response: str, cfg: EngineConfig) -> tuple[TextBlock, EditDiff]:
    """Apply a stripped completion to the edited block and commit."""
    session.clear_busy(op)
    if op.generation != session.generation:
        raise StaleOperation(f"{op.op_id} superseded by undo/redo")
    block = session.blocks.get(op.payload["block_id"])
    if block is None:
        raise StaleOperation(f"block {op.payload['block_id']} vanished")
    diff = word_diff(op.payload["old_text"], response)
    block.text = response
    block.h = layout_text(response, block.x, block.y, block.w, cfg.geometry).box.h
    session.commit(f"gesture:{op.payload['gesture']}:{block.id}")
    return block, diff


def fail_op(session: Session, op: PendingOp, error: Exception) -> None:
    """Clear busy state after a failed completion; blocks keep their text."""
    session.clear_busy(op)
    for bid, pos in op.payload.get("restore_positions", {}).items():
        block = session.blocks.get(bid)
        if block is not None:
            block.x, block.y = pos
    session.log_interaction(op.payload.get("gesture", op.kind), op.block_ids[0] if op.block_ids else None,
                            f"failed:{type(error).__name__}")


def prepare_merge(session: Session, event: GestureEvent, cfg: EngineConfig):
    """Move the dragged block; if it lands on another block, stage a merge.

    Returns ("moved", block) when there is no collision, else a PendingOp.
    """
    dragged = _require_block(session, event.target)
    first, last = event.points[0], event.points[-1]
    drag_vector = (last[0] - first[0], last[1] - first[1])
    old_pos = (dragged.x, dragged.y)
    dragged.x += drag_vector[0]
    dragged.y += drag_vector[1]

    d_layout = block_layout(dragged, cfg)
    best = None
    best_area = 0.0
    for other in session.blocks.values():
        if other.id == dragged.id:
            continue
        inter = d_layout.box.intersect(block_layout(other, cfg).box)
        if inter is not None and inter.area > best_area:
            best, best_area = other, inter.area
    if best is None:
        session.commit(f"gesture:move:{dragged.id}")
        return ("moved", dragged)

    if best.busy:
        dragged.x, dragged.y = old_pos
        raise Busy(f"merge target {best.id} has an operation in flight")

    t_layout = block_layout(best, cfg)
    result = classify_collision(d_layout, t_layout, drag_vector, cfg.geometry)
    intensity = result.intensity.value

    if result.kind is CollisionKind.FULL_BLEND:
        upper, lower = (dragged, best) if d_layout.box.cy <= t_layout.box.cy else (best, dragged)
        template = Template.FULL_BLEND
        slots = {"first": upper.text, "second": lower.text, "intensity": intensity}
        concat_base = upper.text + " " + lower.text
    elif result.kind in (CollisionKind.VERTICAL_TOP_BOTTOM, CollisionKind.VERTICAL_BOTTOM_TOP):
        if result.kind is CollisionKind.VERTICAL_TOP_BOTTOM:
            top, top_layout, top_rows = dragged, d_layout, result.overlap_lines_a
            bottom, bottom_layout, bottom_rows = best, t_layout, result.overlap_lines_b
        else:
            top, top_layout, top_rows = best, t_layout, result.overlap_lines_b
            bottom, bottom_layout, bottom_rows = dragged, d_layout, result.overlap_lines_a
        template = Template.VERTICAL_COLLISION
        slots = {
            "top": mark_lines(top_layout.line_texts(), set(top_rows)),
            "bottom": mark_lines(bottom_layout.line_texts(), set(bottom_rows)),
            "intensity": intensity,
        }
        concat_base = top.text + " " + bottom.text
    else:
        template = Template.HORIZONTAL_COLLISION
        slots = {
            "main": mark_lines(t_layout.line_texts(), set(result.overlap_lines_b)),
            "insert": mark_lines(d_layout.line_texts(), set(result.overlap_lines_a)),
            "insert_position": result.insert_position,
            "intensity": intensity,
        }
        if result.anchor_line:
            slots["insert_line"] = result.anchor_line
        concat_base = best.text + " " + dragged.text

    prompt = build(PromptRequest(template, slots, context=session.writing_context))
    session.log_prompt(template.value, prompt)
    op = PendingOp(
        op_id=session.next_op_id(),
        kind="merge",
        template_name=template.value,
        prompt=prompt,
        block_ids=(dragged.id, best.id),
        payload={
            "gesture": "merge",
            "dragged_id": dragged.id,
            "target_id": best.id,
            "concat_base": concat_base,
            "target_pos": (best.x, best.y),
            "target_width": best.w,
            "restore_positions": {dragged.id: old_pos},
        },
        generation=session.generation,
        started_at=session.clock_ms,
    )
    session.mark_busy(op.block_ids, op)
    return op


def finish_merge(session: Session, op: PendingOp, response: str, cfg: EngineConfig) -> tuple[TextBlock, EditDiff]:
    """Replace both source blocks with the merged result and commit."""
    session.clear_busy(op)
    if op.generation != session.generation:
        raise StaleOperation(f"{op.op_id} superseded by undo/redo")
    dragged_id, target_id = op.payload["dragged_id"], op.payload["target_id"]
    if dragged_id not in session.blocks or target_id not in session.blocks:
        raise StaleOperation("merge sources vanished")
    x, y = op.payload["target_pos"]
    merged = _sized(session, response, x, y, op.payload["target_width"], BlockOrigin.MERGE, cfg)
    del session.blocks[dragged_id]
    del session.blocks[target_id]
    session.blocks[merged.id] = merged
    diff = word_diff(op.payload["concat_base"], response)
    session.commit(f"gesture:merge:{merged.id}")
    return merged, diff


def rip_block(session: Session, event: GestureEvent, cfg: EngineConfig) -> tuple[TextBlock, TextBlock]:
    """Split a block at the tear, purely textually, and commit."""
    block = _require_block(session, event.target)
    layout = block_layout(block, cfg)
    path = [(p[0], p[1]) for p in event.points]
    k = rip_split_index(path, layout)
    left_text, right_text = block.text[:k], block.text[k:]
    if not left_text.strip() or not right_text.strip():
        raise DegenerateSplit("rip would produce a blank piece")
    left = _sized(session, left_text, block.x, block.y, block.w, BlockOrigin.SPLIT, cfg)
    session.blocks[left.id] = left
    right_y = block.y + left.h + cfg.clay.rip_gap
    right = _sized(session, right_text, block.x, right_y, block.w, BlockOrigin.SPLIT, cfg)
    session.blocks[right.id] = right
    del session.blocks[block.id]
    session.commit(f"gesture:rip:{block.id}")
    return left, right
