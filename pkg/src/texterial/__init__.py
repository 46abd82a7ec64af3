"""Texterial: a headless text-as-material engine.

Touch and pen gestures become LLM text operations: drafts are sculpted like
clay (squeeze, pinch, smudge, stretch, squash, merge, rip) and ideas grow
like garden plants (plant, water, prune, graft, compost).  A deterministic
mock provider makes every behavior reproducible offline; a session HTTP API
serves a human-operated touch UI.
"""

from .config import EngineConfig
from .core import (
    GestureEvent,
    GestureKind,
    Intensity,
    OperationKind,
    canonical_hash,
    inverse_of,
)
from .engine import apply_event, run_tick
from .gateway import MockProvider, make_provider
from .session import Session

__version__ = "0.1.0"

__all__ = [
    "EngineConfig",
    "GestureEvent",
    "GestureKind",
    "Intensity",
    "MockProvider",
    "OperationKind",
    "Session",
    "apply_event",
    "canonical_hash",
    "inverse_of",
    "make_provider",
    "run_tick",
    "__version__",
]
