"""Word-level diff marking what changed in the new text, for inline
animation by the UI.  Pure deletions leave nothing to highlight and produce
no span."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

_WORD_RE = re.compile(r"\S+")


class SpanKind(Enum):
    INSERTED = "inserted"
    REPLACED = "replaced"


@dataclass(frozen=True)
class DiffSpan:
    start: int  # character range in the new text
    end: int
    kind: SpanKind


@dataclass(frozen=True)
class EditDiff:
    spans: tuple[DiffSpan, ...]

    def to_dict(self) -> dict:
        return {"spans": [{"start": s.start, "end": s.end, "kind": s.kind.value} for s in self.spans]}


def _lcs_pairs(a: list[str], b: list[str]) -> list[tuple[int, int]]:
    """Matched index pairs of a longest common subsequence (classic DP)."""
    n, m = len(a), len(b)
    dp = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row, below = dp[i], dp[i + 1]
        for j in range(m - 1, -1, -1):
            if a[i] == b[j]:
                row[j] = below[j + 1] + 1
            else:
                row[j] = max(below[j], row[j + 1])
    pairs = []
    i = j = 0
    while i < n and j < m:
        if a[i] == b[j]:
            pairs.append((i, j))
            i += 1
            j += 1
        elif dp[i + 1][j] >= dp[i][j + 1]:
            i += 1
        else:
            j += 1
    return pairs


def word_diff(old: str, new: str) -> EditDiff:
    """Diff old against new at word level; contiguous changes become one span."""
    old_words = [(m.group(0), m.start(), m.end()) for m in _WORD_RE.finditer(old)]
    new_words = [(m.group(0), m.start(), m.end()) for m in _WORD_RE.finditer(new)]
    pairs = _lcs_pairs([w for w, _, _ in old_words], [w for w, _, _ in new_words])

    spans: list[DiffSpan] = []
    prev_i = prev_j = 0
    for pi, pj in pairs + [(len(old_words), len(new_words))]:
        gap_old = pi - prev_i
        gap_new = pj - prev_j
        if gap_new > 0:
            kind = SpanKind.REPLACED if gap_old > 0 else SpanKind.INSERTED
            start = new_words[prev_j][1]
            end = new_words[pj - 1][2]
            spans.append(DiffSpan(start, end, kind))
        prev_i, prev_j = pi + 1, pj + 1
    return EditDiff(spans=tuple(spans))
