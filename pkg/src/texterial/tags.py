"""Intensity-scaled angle-bracket markers and model-output cleanup.

Markers wrap a word-aligned range: level 3 squeeze reads
``<<<squeeze>>>words here<<</squeeze>>>``.  Overlap markers are always
single-bracket and wrap whole visual lines during merges.  Literal ``<`` in
user text is escaped as ``\\<`` before emitting and restored on parse.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from .core import Intensity
from .errors import EmptyCompletion, MisalignedRange

MARKER_KINDS = ("squeeze", "stretch", "squash", "pinch", "smudge", "overlap")

_TOKEN_RE = re.compile(r"(?<!\\)(<{1,4})(/?)(%s)(>{1,4})" % "|".join(MARKER_KINDS))
_ANY_TOKEN_RE = re.compile(r"<{1,4}/?(?:%s)>{1,4}" % "|".join(MARKER_KINDS))


@dataclass(frozen=True)
class Tag:
    kind: str
    start: int
    end: int
    level: int


@dataclass(frozen=True)
class TaggedText:
    plain: str
    tags: tuple[Tag, ...]
    warnings: tuple[str, ...] = field(default=())


def bracket_count(intensity: Intensity | float) -> int:
    """Marker bracket level for an intensity: 1 at zero, capped at 4."""
    value = intensity.value if isinstance(intensity, Intensity) else Intensity(intensity).value
    return min(4, 1 + int(math.floor(4 * value)))


def _escape(text: str) -> str:
    return text.replace("<", "\\<")


def _unescape(text: str) -> str:
    return text.replace("\\<", "<")


def _check_word_aligned(plain: str, start: int, end: int) -> None:
    if not (0 <= start < end <= len(plain)):
        raise MisalignedRange(f"range ({start}, {end}) out of bounds for length {len(plain)}")
    if plain[start].isspace() or plain[end - 1].isspace():
        raise MisalignedRange("range must not start or end on whitespace")
    if start > 0 and not plain[start - 1].isspace():
        raise MisalignedRange("range start is inside a word")
    if end < len(plain) and not plain[end].isspace():
        raise MisalignedRange("range end is inside a word")


def emit_marked(plain: str, start: int, end: int, kind: str, level: int) -> str:
    """Insert opening/closing markers of the given level around the range."""
    if kind not in MARKER_KINDS:
        raise ValueError(f"unknown marker kind {kind!r}")
    if kind == "overlap":
        level = 1
    if not 1 <= level <= 4:
        raise ValueError(f"marker level must be 1..4, got {level}")
    _check_word_aligned(plain, start, end)
    opening = "<" * level + kind + ">" * level
    closing = "<" * level + "/" + kind + ">" * level
    return (
        _escape(plain[:start]) + opening
        + _escape(plain[start:end]) + closing
        + _escape(plain[end:])
    )


def mark_lines(lines: list[str], tagged_rows: set[int]) -> str:
    """Join visual lines, wrapping the tagged rows in overlap markers."""
    out = []
    for i, line in enumerate(lines):
        if i in tagged_rows:
            out.append("<overlap>" + _escape(line) + "</overlap>")
        else:
            out.append(_escape(line))
    return "\n".join(out)


def parse_marked(marked: str) -> TaggedText:
    """Recover plain text and tags; defective markers come back as literals."""
    plain_parts: list[str] = []
    plain_len = 0
    tags: list[Tag] = []
    warnings: list[str] = []
    # open marker stack: (kind, level, plain position, raw token)
    stack: list[tuple[str, int, int, str]] = []
    pos = 0

    def emit_text(segment: str) -> None:
        nonlocal plain_len
        if segment:
            restored = _unescape(segment)
            plain_parts.append(restored)
            plain_len += len(restored)

    for m in _TOKEN_RE.finditer(marked):
        emit_text(marked[pos:m.start()])
        pos = m.end()
        opens, slash, kind, closes = m.groups()
        token = m.group(0)
        level = len(opens)
        if len(opens) != len(closes) or (kind == "overlap" and level != 1):
            warnings.append(f"MalformedMarker: {token!r}")
            emit_text(token)
            continue
        if not slash:
            stack.append((kind, level, plain_len, token))
        else:
            if stack and stack[-1][0] == kind and stack[-1][1] == level:
                _, _, start, _ = stack.pop()
                tags.append(Tag(kind, start, plain_len, level))
            else:
                warnings.append(f"UnbalancedMarker: stray {token!r}")
                emit_text(token)
    emit_text(marked[pos:])

    plain = "".join(plain_parts)
    if stack:
        # Reinsert unmatched openers as literal text at their recorded spots.
        for kind, level, at, token in reversed(stack):
            warnings.append(f"UnbalancedMarker: unclosed {token!r}")
            plain = plain[:at] + token + plain[at:]
            tags = [
                Tag(t.kind,
                    t.start + len(token) if t.start >= at else t.start,
                    t.end + len(token) if t.end > at else t.end,
                    t.level)
                for t in tags
            ]
    tags.sort(key=lambda t: (t.start, t.end))
    return TaggedText(plain=plain, tags=tuple(tags), warnings=tuple(warnings))


_FENCE_LINE = re.compile(r"^\s*```.*$", re.MULTILINE)


def strip_model_artifacts(response: str) -> str:
    """Remove residual markers, code fences and stray emphasis from a response.

    Idempotent by construction (applied to a fixpoint).  Raises
    EmptyCompletion when nothing but artifacts remained.
    """
    text = response
    for _ in range(8):
        before = text
        text = _FENCE_LINE.sub("", text)
        text = _ANY_TOKEN_RE.sub("", text)
        text = text.replace("**", "").replace("__", "")
        text = text.strip()
        while text[:1] in ("*", "_"):
            text = text[1:].lstrip()
        while text[-1:] in ("*", "_"):
            text = text[:-1].rstrip()
        text = _collapse_blank_runs(text)
        text = text.strip()
        if text == before:
            break
    if not text:
        raise EmptyCompletion("model response empty after stripping artifacts")
    return text


def _collapse_blank_runs(text: str) -> str:
    """Runs of more than two blank lines collapse to a single blank line."""
    lines = text.split("\n")
    out: list[str] = []
    blanks: list[str] = []
    for line in lines:
        if line.strip() == "":
            blanks.append(line)
        else:
            out.extend([""] if len(blanks) > 2 else blanks)
            blanks = []
            out.append(line)
    out.extend([""] if len(blanks) > 2 else blanks)
    return "\n".join(out)
