"""Shared domain types, the operation taxonomy, and canonical state hashing.

The taxonomy maps every sculpting and gardening verb onto one of eight text
operations; three of the base operations have registered inverses.  Canonical
hashing fixes key order and numeric formatting so that equal session states
always produce equal digests, which is what makes trace replay checkable.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum


class OperationKind(Enum):
    COMPOSE = "compose"
    ISOLATE = "isolate"
    ABSTRACT = "abstract"
    CONCRETIZE = "concretize"
    IDEATE = "ideate"
    CONDENSE = "condense"
    ELABORATE = "elaborate"
    TRANSFORM = "transform"


class Layer(Enum):
    """Text component an operation touches.  Logging metadata only."""

    SEMANTICS = "semantics"
    STRUCTURE = "structure"
    STYLE = "style"


_INVERSE_PAIRS = (
    (OperationKind.COMPOSE, OperationKind.ISOLATE),
    (OperationKind.ABSTRACT, OperationKind.CONCRETIZE),
    (OperationKind.CONDENSE, OperationKind.ELABORATE),
)

_INVERSES: dict[OperationKind, OperationKind] = {}
for _a, _b in _INVERSE_PAIRS:
    _INVERSES[_a] = _b
    _INVERSES[_b] = _a


def inverse_of(op: OperationKind) -> OperationKind | None:
    """Return the registered inverse operation, or None for ideate/transform."""
    return _INVERSES.get(op)


# Default layer attached to interaction-log entries for each operation.
OPERATION_LAYER: dict[OperationKind, Layer] = {
    OperationKind.COMPOSE: Layer.STRUCTURE,
    OperationKind.ISOLATE: Layer.STRUCTURE,
    OperationKind.ABSTRACT: Layer.SEMANTICS,
    OperationKind.CONCRETIZE: Layer.SEMANTICS,
    OperationKind.IDEATE: Layer.SEMANTICS,
    OperationKind.CONDENSE: Layer.STRUCTURE,
    OperationKind.ELABORATE: Layer.STRUCTURE,
    OperationKind.TRANSFORM: Layer.STYLE,
}


class GestureVerb(Enum):
    """Sculpting and gardening verbs at the vocabulary level."""

    SQUEEZE = "squeeze"
    MERGE_LOW_OVERLAP = "merge_low_overlap"
    MERGE_HIGH_OVERLAP = "merge_high_overlap"
    SMUDGE = "smudge"
    PINCH = "pinch"
    RIP = "rip"
    STRETCH = "stretch"
    SQUASH = "squash"
    PLANT = "plant"
    WATER = "water"
    PRUNE = "prune"
    GRAFT = "graft"
    COMPOST = "compost"


GESTURE_OPERATION: dict[GestureVerb, OperationKind] = {
    GestureVerb.SQUEEZE: OperationKind.ELABORATE,
    GestureVerb.MERGE_LOW_OVERLAP: OperationKind.COMPOSE,
    GestureVerb.MERGE_HIGH_OVERLAP: OperationKind.TRANSFORM,
    GestureVerb.SMUDGE: OperationKind.ABSTRACT,
    GestureVerb.PINCH: OperationKind.CONCRETIZE,
    GestureVerb.RIP: OperationKind.ISOLATE,
    GestureVerb.STRETCH: OperationKind.ELABORATE,
    GestureVerb.SQUASH: OperationKind.CONDENSE,
    GestureVerb.PLANT: OperationKind.IDEATE,
    GestureVerb.WATER: OperationKind.IDEATE,
    GestureVerb.PRUNE: OperationKind.ISOLATE,
    GestureVerb.GRAFT: OperationKind.COMPOSE,
    GestureVerb.COMPOST: OperationKind.COMPOSE,
}


def operation_for(verb: GestureVerb) -> OperationKind:
    """Total mapping from gesture verb to text operation."""
    return GESTURE_OPERATION[verb]


@dataclass(frozen=True)
class Intensity:
    """Gesture intensity scalar, always within [0, 1]."""

    value: float

    def __post_init__(self):
        if not (isinstance(self.value, (int, float)) and math.isfinite(self.value)):
            raise ValueError(f"intensity must be a finite number, got {self.value!r}")
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"intensity out of range [0, 1]: {self.value}")

    @property
    def percent(self) -> int:
        """Rounded percentage, half away from zero (derived, never stored)."""
        return int(math.floor(self.value * 100 + 0.5))


class BlockOrigin(Enum):
    VOICE = "voice"
    MANUAL = "manual"
    SPLIT = "split"
    MERGE = "merge"


@dataclass
class TextBlock:
    """A positioned fragment of draft text on the sculpting canvas."""

    id: str
    text: str
    x: float
    y: float
    w: float
    h: float
    origin: BlockOrigin
    busy: bool = False

    def __post_init__(self):
        # coordinates are canonically reals; int inputs would hash differently
        self.x, self.y, self.w, self.h = float(self.x), float(self.y), float(self.w), float(self.h)
        if not self.text.strip():
            raise ValueError("block text must be non-blank")
        if not (self.w > 0 and self.h > 0):
            raise ValueError("block size must be strictly positive")
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("block position must be finite")


class GestureKind(Enum):
    PRESS = "press"
    DRAG_BLOCK = "drag_block"
    PINCH = "pinch"
    SMUDGE = "smudge"
    STRETCH = "stretch"
    SQUASH = "squash"
    RIP = "rip"
    WATER_LINE = "water_line"
    PLANT_PRESS = "plant_press"
    PLUCK_LEAF = "pluck_leaf"
    DROP_LEAF = "drop_leaf"
    PRESERVE_HOLD = "preserve_hold"
    EDIT_LEAF = "edit_leaf"
    VOICE_UTTERANCE = "voice_utterance"


#: Kinds whose meaning depends on touch coordinates.
SPATIAL_KINDS = frozenset({
    GestureKind.PRESS,
    GestureKind.DRAG_BLOCK,
    GestureKind.PINCH,
    GestureKind.SMUDGE,
    GestureKind.STRETCH,
    GestureKind.SQUASH,
    GestureKind.RIP,
    GestureKind.WATER_LINE,
    GestureKind.PLANT_PRESS,
    GestureKind.DROP_LEAF,
})


@dataclass(frozen=True)
class GestureEvent:
    """One already-classified touch/pen event from the UI or a trace."""

    kind: GestureKind
    points: tuple[tuple[float, float, float], ...] = ()
    target: str | None = None
    payload: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "points",
                           tuple((float(x), float(y), float(t)) for x, y, t in self.points))
        if self.kind in SPATIAL_KINDS and not self.points:
            raise ValueError(f"{self.kind.value} event requires points")
        ts = [p[2] for p in self.points]
        if any(b < a for a, b in zip(ts, ts[1:])):
            raise ValueError("event timestamps must be non-decreasing")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "points": [list(p) for p in self.points],
            "target": self.target,
            "payload": self.payload,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GestureEvent":
        return cls(
            kind=GestureKind(d["kind"]),
            points=tuple((float(p[0]), float(p[1]), float(p[2])) for p in d.get("points", [])),
            target=d.get("target"),
            payload=d.get("payload"),
        )


class LeafStatus(Enum):
    ACTIVE = "active"
    PRUNED = "pruned"
    PRESERVED = "preserved"
    GRAFTED = "grafted"
    COMPOSTED = "composted"


#: Statuses still counted as live ideas when building prompts.
ACTIVE_STATUSES = frozenset({LeafStatus.ACTIVE, LeafStatus.PRESERVED})


@dataclass(frozen=True)
class SessionSnapshot:
    """Full serialized session state captured after one committed change."""

    sequence: int
    cause: str
    state: dict
    hash: str = field(default="")

    def __post_init__(self):
        if not self.hash:
            object.__setattr__(self, "hash", canonical_hash(self.state))


def canonical_json(value) -> str:
    """Serialize to JSON with sorted keys and fixed 6-decimal float formatting.

    This is the hashing and on-disk form: equal states produce identical
    bytes on every platform.
    """
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite float in canonical state: {value}")
        if value == 0.0:
            value = 0.0  # normalize -0.0
        return f"{value:.6f}"
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, Enum):
        return canonical_json(value.value)
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(canonical_json(v) for v in value) + "]"
    if isinstance(value, dict):
        parts = []
        for key in sorted(value):
            if not isinstance(key, str):
                raise TypeError(f"canonical dict keys must be strings, got {key!r}")
            parts.append(json.dumps(key, ensure_ascii=False) + ":" + canonical_json(value[key]))
        return "{" + ",".join(parts) + "}"
    raise TypeError(f"cannot canonicalize {type(value).__name__}")


def canonical_hash(state) -> str:
    """SHA-256 digest of the canonical serialization."""
    return hashlib.sha256(canonical_json(state).encode("utf-8")).hexdigest()
