"""Prompt assembly from the twelve template resources.

Template bodies live under ``resources/templates`` and are substituted with
a single regex pass over their named slots, so user text can never trigger a
second substitution.  Intensity-regime sentences and insert-position wording
are owned here.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources

from .core import ACTIVE_STATUSES
from .errors import MissingSlot, UnknownTemplate


class Template(Enum):
    SQUEEZE = "squeeze"
    STRETCH = "stretch"
    SQUASH = "squash"
    PINCH = "pinch"
    DISTORT = "distort"
    VERTICAL_COLLISION = "vertical_collision"
    FULL_BLEND = "full_blend"
    HORIZONTAL_COLLISION = "horizontal_collision"
    GENERATE_IDEA_PAIR = "generate_idea_pair"
    INITIAL_IDEA_PAIR = "initial_idea_pair"
    VOICE_PLANT = "voice_plant"
    ROOT_COMBINE = "root_combine"

    @classmethod
    def from_name(cls, name: str) -> "Template":
        try:
            return cls(name)
        except ValueError:
            raise UnknownTemplate(f"no template named {name!r}") from None


_CONTEXT_LINE = 'The user is working on: "{userWritingContext}". '

_VERTICAL_REGIMES = (
    "Light blending: Make minimal changes to create a smooth transition while preserving most original content.",
    "Moderate blending: Create a natural flow by moderately editing the overlapping areas to merge the concepts.",
    "Heavy blending: Extensively merge and blend the overlapping content to create a mixed/blended version of the two texts",
)

_HORIZONTAL_REGIMES = (
    "Light blending: Insert with minimal changes, preserving the original structure and making small adjustments for flow.",
    "Moderate blending: Blend the insertion more naturally by moderately editing both texts to create smoother integration.",
    "Heavy blending: Extensively merge and weave the content together, creating a deeply integrated unified combined text.",
)

_INSERT_ANCHOR = 'The second text MUST be inserted around the line: "{insertLineText}", creating a cohesive transition between them.'
_INSERT_POSITIONAL = "The second text MUST be inserted {positionDescription} of the main text, creating a cohesive transition between them."


def blend_regime(intensity: float, template: Template) -> str:
    """Blending guidance sentence for a collision intensity."""
    if template is Template.VERTICAL_COLLISION:
        regimes = _VERTICAL_REGIMES
    elif template is Template.HORIZONTAL_COLLISION:
        regimes = _HORIZONTAL_REGIMES
    else:
        raise UnknownTemplate(f"blend regimes exist only for collision templates, not {template}")
    if intensity < 0.6:
        return regimes[0]
    if intensity < 0.9:
        return regimes[1]
    return regimes[2]


def position_word(pos: float) -> str:
    """Insert-position wording: beginning below 0.3, end above 0.7."""
    return "beginning" if pos < 0.3 else "end" if pos > 0.7 else "middle"


def intensity_percent(intensity: float) -> int:
    """Percentage rendering used in collision prompts (round half up)."""
    return int(math.floor(intensity * 100 + 0.5))


def _load(name: str) -> str:
    path = resources.files("texterial") / "resources" / "templates" / f"{name}.txt"
    return path.read_text(encoding="utf-8")


_BODIES: dict[str, str] = {}


def _body(name: str) -> str:
    if name not in _BODIES:
        _BODIES[name] = _load(name)
    return _BODIES[name]


def _fill(body: str, slots: dict[str, str]) -> str:
    def repl(m: re.Match) -> str:
        key = m.group(1)
        return slots.get(key, m.group(0))
    return re.sub(r"\{(\w+)\}", repl, body)


@dataclass(frozen=True)
class PromptRequest:
    template: Template
    slots: dict = field(default_factory=dict)
    context: str | None = None


_REQUIRED_SLOTS: dict[Template, tuple[str, ...]] = {
    Template.SQUEEZE: ("segments",),
    Template.STRETCH: ("segments", "original"),
    Template.SQUASH: ("segments", "original"),
    Template.PINCH: ("segments",),
    Template.DISTORT: ("segments",),
    Template.VERTICAL_COLLISION: ("top", "bottom", "intensity"),
    Template.FULL_BLEND: ("first", "second", "intensity"),
    Template.HORIZONTAL_COLLISION: ("main", "insert", "insert_position", "intensity"),
    Template.GENERATE_IDEA_PAIR: ("seed", "dimension", "existing_ideas"),
    Template.INITIAL_IDEA_PAIR: ("seed", "dimension"),
    Template.VOICE_PLANT: ("transcript",),
    Template.ROOT_COMBINE: ("ideas",),
}


def build(req: PromptRequest) -> str:
    """Assemble the prompt for a request; output is byte-stable per fixture."""
    if not isinstance(req.template, Template):
        raise UnknownTemplate(f"not a template: {req.template!r}")
    missing = [s for s in _REQUIRED_SLOTS[req.template] if s not in req.slots]
    if missing:
        raise MissingSlot(f"{req.template.value} prompt missing slots: {', '.join(missing)}")
    for key in ("intensity", "insert_position"):
        if key in req.slots and not 0.0 <= float(req.slots[key]) <= 1.0:
            raise ValueError(f"slot {key} must lie in [0, 1]")

    context_line = _CONTEXT_LINE.replace("{userWritingContext}", req.context) if req.context else ""
    s = req.slots
    t = req.template

    if t in (Template.SQUEEZE, Template.PINCH, Template.DISTORT):
        return _fill(_body(t.value), {"contextLine": context_line, "segmentsText": s["segments"]})

    if t in (Template.STRETCH, Template.SQUASH):
        segments = s["segments"]
        has_tagged = "<" in segments and ">" in segments
        if has_tagged:
            return _fill(_body(f"{t.value}_tagged"),
                         {"contextLine": context_line, "segmentsText": segments})
        return _fill(_body(f"{t.value}_fallback"),
                     {"contextLine": context_line, "originalText": s["original"]})

    if t is Template.VERTICAL_COLLISION:
        i = float(s["intensity"])
        return _fill(_body("vertical_collision"), {
            "contextLine": context_line,
            "intensityPercent": str(intensity_percent(i)),
            "blendingGuidance": blend_regime(i, t),
            "topTextWithTags": s["top"],
            "bottomTextWithTags": s["bottom"],
        })

    if t is Template.FULL_BLEND:
        i = float(s["intensity"])
        return _fill(_body("full_blend_collision"), {
            "contextLine": context_line,
            "intensityPercent": str(intensity_percent(i)),
            "firstText": s["first"],
            "secondText": s["second"],
        })

    if t is Template.HORIZONTAL_COLLISION:
        i = float(s["intensity"])
        insert_line = s.get("insert_line")
        if insert_line:
            instruction = _INSERT_ANCHOR.replace("{insertLineText}", insert_line)
        else:
            instruction = _INSERT_POSITIONAL.replace(
                "{positionDescription}", position_word(float(s["insert_position"])))
        return _fill(_body("horizontal_collision"), {
            "contextLine": context_line,
            "intensityPercent": str(intensity_percent(i)),
            "mainTextWithTags": s["main"],
            "insertTextWithTags": s["insert"],
            "insertionInstruction": instruction,
        })

    if t is Template.GENERATE_IDEA_PAIR:
        prompt = _fill(_body("generate_idea_pair"), {
            "seedText": s["seed"],
            "dimension": s["dimension"],
            "existingIdeas": s["existing_ideas"],
            "rootContextLine": s.get("root_context", ""),
        })
        return context_line + prompt

    if t is Template.INITIAL_IDEA_PAIR:
        prompt = _fill(_body("initial_idea_pair"), {
            "seedText": s["seed"],
            "dimension": s["dimension"],
            "rootContextLine": s.get("root_context", ""),
        })
        return context_line + prompt

    if t is Template.VOICE_PLANT:
        return context_line + _fill(_body("voice_plant"), {"transcript": s["transcript"]})

    if t is Template.ROOT_COMBINE:
        return context_line + _fill(_body("root_combine"), {"ideas": s["ideas"]})

    raise UnknownTemplate(f"no builder for {t}")  # pragma: no cover


def serialize_prior_ideas(leaves) -> str:
    """One '- ' line per live leaf's full text, in generation order."""
    return "\n".join(f"- {leaf.full}" for leaf in leaves if leaf.status in ACTIVE_STATUSES)


def root_network_block(fulls: list[str]) -> str:
    """Root-network section for grafted lineage; empty when there is none."""
    if not fulls:
        return ""
    return "IDEAS FROM ROOT NETWORK:\n" + "\n".join(f"- {f}" for f in fulls)
