"""Pure geometric interpretation of touch input against text layouts.

Headless mode lays text out on a deterministic monospace grid (8x16 canvas
units per glyph cell, greedy word wrap at the block width), so every scope,
split point and collision is computable without a renderer.  All functions
here are pure: no clocks, no randomness, no shared state.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum

from .config import GeometryConfig
from .core import Intensity
from .errors import DegenerateSplit, NoCollision, NoTarget

_WORD_RE = re.compile(r"\S+")


@dataclass(frozen=True)
class Box:
    x: float
    y: float
    w: float
    h: float

    @property
    def right(self) -> float:
        return self.x + self.w

    @property
    def bottom(self) -> float:
        return self.y + self.h

    @property
    def cx(self) -> float:
        return self.x + self.w / 2

    @property
    def cy(self) -> float:
        return self.y + self.h / 2

    @property
    def area(self) -> float:
        return self.w * self.h

    def intersect(self, other: "Box") -> "Box | None":
        x0 = max(self.x, other.x)
        y0 = max(self.y, other.y)
        x1 = min(self.right, other.right)
        y1 = min(self.bottom, other.bottom)
        if x1 <= x0 or y1 <= y0:
            return None
        return Box(x0, y0, x1 - x0, y1 - y0)

    def contains(self, px: float, py: float) -> bool:
        return self.x <= px <= self.right and self.y <= py <= self.bottom


@dataclass(frozen=True)
class WordBox:
    start: int  # character range in the original text
    end: int
    box: Box


@dataclass(frozen=True)
class LineBox:
    start: int
    end: int
    row: int
    box: Box


@dataclass(frozen=True)
class TextLayout:
    """Word and visual-line boxes for one block's text."""

    text: str
    box: Box  # the block bounding box used for collision tests
    words: tuple[WordBox, ...]
    lines: tuple[LineBox, ...]

    def line_texts(self) -> list[str]:
        return [self.text[ln.start:ln.end] for ln in self.lines]

    def line_index_at(self, index: int) -> int:
        """Row of the visual line containing character `index`."""
        for ln in self.lines:
            if ln.start <= index <= ln.end:
                return ln.row
        return self.lines[-1].row if self.lines else 0


def layout_text(
    text: str,
    x: float,
    y: float,
    width: float,
    cfg: GeometryConfig = GeometryConfig(),
) -> TextLayout:
    """Monospace layout: greedy wrap at `width`, newlines force breaks.

    Visual lines are slices of the original text, so every word and line
    carries its exact character range.
    """
    max_cols = max(1, int(width // cfg.cell_w))
    words: list[WordBox] = []
    lines: list[LineBox] = []
    row = 0
    pos = 0
    for para in text.split("\n"):
        para_start = pos
        para_words = [(m.start() + para_start, m.end() + para_start) for m in _WORD_RE.finditer(para)]
        if not para_words:
            lines.append(LineBox(para_start, para_start, row, Box(x, y + row * cfg.cell_h, 0.0, cfg.cell_h)))
            row += 1
        else:
            line_start = para_start
            line_words: list[tuple[int, int]] = []
            for ws, we in para_words:
                if line_words and (we - line_start) > max_cols:
                    _close_line(text, x, y, cfg, lines, words, line_start, line_words, row)
                    row += 1
                    line_start = ws
                    line_words = [(ws, we)]
                else:
                    line_words.append((ws, we))
            _close_line(text, x, y, cfg, lines, words, line_start, line_words, row)
            row += 1
        pos += len(para) + 1  # account for the newline
    block_h = max(1, row) * cfg.cell_h
    return TextLayout(text=text, box=Box(x, y, width, block_h), words=tuple(words), lines=tuple(lines))


def _close_line(text, x, y, cfg, lines, words, line_start, line_words, row):
    line_end = line_words[-1][1]
    ly = y + row * cfg.cell_h
    lines.append(LineBox(line_start, line_end, row, Box(x, ly, (line_end - line_start) * cfg.cell_w, cfg.cell_h)))
    for ws, we in line_words:
        wx = x + (ws - line_start) * cfg.cell_w
        words.append(WordBox(ws, we, Box(wx, ly, (we - ws) * cfg.cell_w, cfg.cell_h)))


class CollisionKind(Enum):
    VERTICAL_TOP_BOTTOM = "vertical_top_bottom"
    VERTICAL_BOTTOM_TOP = "vertical_bottom_top"
    HORIZONTAL_INSERT = "horizontal_insert"
    FULL_BLEND = "full_blend"


@dataclass(frozen=True)
class CollisionResult:
    kind: CollisionKind
    intensity: Intensity
    overlap_lines_a: tuple[int, ...]  # dragged block line rows
    overlap_lines_b: tuple[int, ...]  # target block line rows
    insert_position: float | None = None
    anchor_line: str | None = None


def classify_collision(
    dragged: TextLayout,
    target: TextLayout,
    drag_vector: tuple[float, float],
    cfg: GeometryConfig = GeometryConfig(),
) -> CollisionResult:
    """Classify a block-on-block drop by direction of approach and overlap.

    Intensity is the intersection area normalized by the smaller block, so a
    small block fully swallowed by a large one reads as 1.0.
    """
    inter = dragged.box.intersect(target.box)
    if inter is None:
        raise NoCollision("block bounding boxes are disjoint")
    intensity = Intensity(min(1.0, inter.area / min(dragged.box.area, target.box.area)))

    overlap_a = tuple(ln.row for ln in dragged.lines if ln.box.intersect(inter) is not None)
    overlap_b = tuple(ln.row for ln in target.lines if ln.box.intersect(inter) is not None)

    if intensity.value >= cfg.full_blend_threshold:
        return CollisionResult(CollisionKind.FULL_BLEND, intensity, overlap_a, overlap_b)

    dx, dy = drag_vector
    if abs(dy) >= abs(dx):
        if dragged.box.cy < target.box.cy:
            kind = CollisionKind.VERTICAL_TOP_BOTTOM
        else:
            kind = CollisionKind.VERTICAL_BOTTOM_TOP
        return CollisionResult(kind, intensity, overlap_a, overlap_b)

    pos = (inter.cy - target.box.y) / target.box.h
    pos = min(1.0, max(0.0, pos))
    anchor = None
    candidates = [ln for ln in target.lines if ln.row in overlap_b and ln.end > ln.start]
    if candidates:
        nearest = min(candidates, key=lambda ln: (abs(ln.box.cy - inter.cy), ln.row))
        anchor = target.text[nearest.start:nearest.end]
    return CollisionResult(
        CollisionKind.HORIZONTAL_INSERT, intensity, overlap_a, overlap_b,
        insert_position=pos, anchor_line=anchor,
    )


def _covering_range(selected: list[WordBox]) -> tuple[int, int]:
    return min(w.start for w in selected), max(w.end for w in selected)


def pinch_influence(
    center: tuple[float, float],
    initial_span: float,
    final_span: float,
    layout: TextLayout,
    cfg: GeometryConfig = GeometryConfig(),
) -> tuple[tuple[int, int], Intensity]:
    """Distance-based influence from the pinch center.

    A word is influenced when 1 - dist/initial_span exceeds the influence
    threshold; intensity measures how far the finger span contracted.
    """
    if initial_span <= 0:
        raise ValueError("initial span must be positive")
    selected = []
    for w in layout.words:
        d = math.hypot(w.box.cx - center[0], w.box.cy - center[1])
        if max(0.0, 1.0 - d / initial_span) > cfg.influence_threshold:
            selected.append(w)
    if not selected:
        raise NoTarget("no word within pinch influence")
    intensity = Intensity(min(1.0, max(0.0, 1.0 - final_span / initial_span)))
    return _covering_range(selected), intensity


def _disc_hits_box(cx: float, cy: float, r: float, box: Box) -> bool:
    nx = min(max(cx, box.x), box.right)
    ny = min(max(cy, box.y), box.bottom)
    return math.hypot(cx - nx, cy - ny) <= r


def press_extent(center: tuple[float, float], radius: float, layout: TextLayout) -> tuple[int, int]:
    """Minimal contiguous range covering every word touched by the press disc."""
    if radius <= 0:
        raise ValueError("press radius must be positive")
    selected = [w for w in layout.words if _disc_hits_box(center[0], center[1], radius, w.box)]
    if not selected:
        raise NoTarget("press disc touches no word")
    return _covering_range(selected)


def _axis_overlaps(lo: float, hi: float, box_lo: float, box_hi: float) -> bool:
    """Positive overlap, or containment when the finger extent is degenerate."""
    if hi > lo:
        return max(lo, box_lo) < min(hi, box_hi)
    return box_lo <= lo <= box_hi


def two_finger_scope(
    p1: tuple[float, float],
    p2: tuple[float, float],
    layout: TextLayout,
) -> tuple[int, int]:
    """Range covered by the axis-aligned box spanned by two fingers."""
    if p1 == p2:
        raise ValueError("scope fingers must differ")
    x0, x1 = sorted((p1[0], p2[0]))
    y0, y1 = sorted((p1[1], p2[1]))
    selected = [
        w for w in layout.words
        if _axis_overlaps(x0, x1, w.box.x, w.box.right)
        and _axis_overlaps(y0, y1, w.box.y, w.box.bottom)
    ]
    if not selected:
        raise NoTarget("scope box touches no word")
    return _covering_range(selected)


_SENTENCE_END = re.compile(r"[.!?\n]")


def rip_split_index(tear_path: list[tuple[float, float]], layout: TextLayout) -> int:
    """Split index nearest the tear: a sentence boundary by line height, or
    the nearest word boundary when the text has no interior sentence end."""
    if not tear_path:
        raise NoTarget("empty tear path")
    xs = [p[0] for p in tear_path]
    ys = [p[1] for p in tear_path]
    path_box = Box(min(xs), min(ys), max(xs) - min(xs) or 1e-9, max(ys) - min(ys) or 1e-9)
    if layout.box.intersect(path_box) is None and not any(layout.box.contains(px, py) for px, py in tear_path):
        raise NoTarget("tear path misses the block")
    mean_x = sum(xs) / len(xs)
    mean_y = sum(ys) / len(ys)
    text = layout.text

    sentence_idx: list[int] = []
    for m in _SENTENCE_END.finditer(text):
        k = m.end()
        while k < len(text) and text[k].isspace():
            k += 1
        if 0 < k < len(text):
            sentence_idx.append(k)
    if sentence_idx:
        def line_y(k: int) -> float:
            row = layout.line_index_at(k)
            for ln in layout.lines:
                if ln.row == row:
                    return ln.box.cy
            return layout.box.cy
        return min(sentence_idx, key=lambda k: (abs(line_y(k) - mean_y), k))

    word_idx = [w.start for w in layout.words[1:] if 0 < w.start < len(text)]
    if not word_idx:
        raise DegenerateSplit("no non-trivial boundary to rip at")

    def word_pos(k: int) -> tuple[float, float]:
        for w in layout.words:
            if w.start == k:
                return (w.box.x, w.box.cy)
        return (layout.box.cx, layout.box.cy)

    return min(word_idx, key=lambda k: (math.hypot(word_pos(k)[0] - mean_x, word_pos(k)[1] - mean_y), k))


def _dist_point_segment(px, py, ax, ay, bx, by) -> float:
    vx, vy = bx - ax, by - ay
    norm2 = vx * vx + vy * vy
    if norm2 == 0:
        return math.hypot(px - ax, py - ay)
    t = min(1.0, max(0.0, ((px - ax) * vx + (py - ay) * vy) / norm2))
    return math.hypot(px - (ax + t * vx), py - (ay + t * vy))


def smudge_extent(
    path: list[tuple[float, float]],
    layout: TextLayout,
    cfg: GeometryConfig = GeometryConfig(),
) -> tuple[tuple[int, int], Intensity]:
    """Words near the smear path, with intensity from path length over block width."""
    if len(path) < 2:
        raise ValueError("smudge path needs at least two points")
    selected = []
    for w in layout.words:
        d = min(
            _dist_point_segment(w.box.cx, w.box.cy, a[0], a[1], b[0], b[1])
            for a, b in zip(path, path[1:])
        )
        if d <= cfg.brush_radius:
            selected.append(w)
    if not selected:
        raise NoTarget("smudge path touches no word")
    path_len = sum(math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(path, path[1:]))
    intensity = Intensity(min(1.0, max(0.0, path_len / layout.box.w)))
    return _covering_range(selected), intensity


@dataclass(frozen=True)
class FernExtent:
    """Horizontal footprint and base height of one fern, for watering."""

    fern_id: str
    x_min: float
    x_max: float
    base_y: float


def water_targets(stroke: list[tuple[float, float]], ferns: list[FernExtent]) -> list[str]:
    """Ferns under the rain line: x-ranges overlap and the base sits below it."""
    if not stroke:
        raise ValueError("water stroke must be non-empty")
    xs = [p[0] for p in stroke]
    mean_y = sum(p[1] for p in stroke) / len(stroke)
    lo, hi = min(xs), max(xs)
    return [
        f.fern_id
        for f in ferns
        if f.x_min <= hi and f.x_max >= lo and f.base_y > mean_y
    ]
