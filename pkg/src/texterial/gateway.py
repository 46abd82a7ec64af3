"""Provider abstraction: a live chat-completions HTTP backend and a
deterministic mock oracle.

The mock is a pure function of (template, prompt).  Each template gets a
fixed transform rule chosen so the corresponding engine invariant is
mechanically checkable: squashes shrink, stretches repeat, merges preserve
top-before-bottom ordering verbatim, idea pairs follow a countable format.
"""

from __future__ import annotations

import json
import logging
import re
import time
from dataclasses import dataclass

import httpx

from .config import ProviderConfig
from .errors import (
    CardinalityViolation,
    LengthViolation,
    MalformedJson,
    ProviderError,
    ProviderTimeout,
    ResponseValidationError,
)
from .prompts import Template
from .tags import parse_marked, strip_model_artifacts

logger = logging.getLogger(__name__)

_LENGTH_GIST_WORDS = 15
_LENGTH_FULL_WORDS = 120
_LENGTH_SEED_WORDS = 120
_LENGTH_DIMENSION_WORDS = 12


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    template: Template
    request_id: str
    max_words_hint: int | None = None

    def __post_init__(self):
        if not self.prompt:
            raise ValueError("prompt must be non-empty")


@dataclass(frozen=True)
class Idea:
    gist: str
    full: str


@dataclass(frozen=True)
class IdeaPair:
    ideas: tuple[Idea, Idea]


@dataclass(frozen=True)
class SeedDimension:
    seed: str
    dimension: str


class MockProvider:
    """Deterministic offline stand-in; same prompt in, same text out."""

    def __init__(self, delay_ms: int = 0):
        self.delay_ms = delay_ms

    @property
    def available(self) -> bool:
        return True

    def complete_raw(self, req: CompletionRequest) -> str:
        if self.delay_ms:
            time.sleep(self.delay_ms / 1000.0)
        handler = _MOCK_RULES[req.template]
        return handler(req.prompt)


class HttpProvider:
    """Chat-completions-style JSON API client with one retry on failure."""

    def __init__(self, cfg: ProviderConfig, transport: httpx.BaseTransport | None = None):
        self.cfg = cfg
        timeout = max(0.1, cfg.deadline_s / 2)
        headers = {}
        if cfg.api_key:
            headers["Authorization"] = f"Bearer {cfg.api_key}"
        self._client = httpx.Client(
            base_url=cfg.base_url or "http://unconfigured.invalid",
            headers=headers,
            timeout=timeout,
            transport=transport,
        )

    @property
    def available(self) -> bool:
        return bool(self.cfg.base_url)

    def complete_raw(self, req: CompletionRequest) -> str:
        if not self.available:
            raise ProviderError("live provider has no base URL configured")
        body = {
            "model": self.cfg.model,
            "messages": [{"role": "user", "content": req.prompt}],
        }
        last_exc: Exception | None = None
        for attempt in range(2):
            try:
                resp = self._client.post("/chat/completions", json=body)
            except httpx.TimeoutException as exc:
                last_exc = ProviderTimeout(f"provider timed out: {exc}")
                continue
            except httpx.TransportError as exc:
                last_exc = ProviderError(f"provider unreachable: {exc}")
                continue
            if resp.status_code != 200:
                raise ProviderError(f"provider returned {resp.status_code}", status=resp.status_code)
            try:
                return resp.json()["choices"][0]["message"]["content"]
            except (KeyError, IndexError, TypeError, json.JSONDecodeError) as exc:
                raise ProviderError(f"unexpected provider payload: {exc}") from exc
        assert last_exc is not None
        raise last_exc

    def close(self) -> None:
        self._client.close()


def make_provider(cfg: ProviderConfig):
    if cfg.provider == "mock":
        return MockProvider(delay_ms=cfg.mock_delay_ms)
    if cfg.provider == "live":
        return HttpProvider(cfg)
    raise ValueError(f"unknown provider {cfg.provider!r}")


def complete(provider, req: CompletionRequest) -> str:
    """Raw completion with model artifacts stripped."""
    return strip_model_artifacts(provider.complete_raw(req))


_REASK_SUFFIX = "\n\nReturn ONLY the JSON object."


def complete_idea_pair(provider, req: CompletionRequest) -> IdeaPair:
    """Completion parsed and validated as an idea pair, with one re-ask."""
    if req.template not in (Template.GENERATE_IDEA_PAIR, Template.INITIAL_IDEA_PAIR):
        raise ValueError(f"not an idea-pair template: {req.template}")
    raw = provider.complete_raw(req)
    try:
        return parse_idea_pair(raw)
    except ResponseValidationError as exc:
        logger.warning("idea pair response invalid (%s); re-asking once", exc)
        retry = CompletionRequest(req.prompt + _REASK_SUFFIX, req.template, req.request_id + "-retry")
        return parse_idea_pair(provider.complete_raw(retry))


def complete_seed_dimension(provider, req: CompletionRequest) -> SeedDimension:
    """Completion parsed as {seed, dimension}, with one re-ask."""
    if req.template not in (Template.VOICE_PLANT, Template.ROOT_COMBINE):
        raise ValueError(f"not a seed/dimension template: {req.template}")
    raw = provider.complete_raw(req)
    try:
        return parse_seed_dimension(raw)
    except ResponseValidationError as exc:
        logger.warning("seed/dimension response invalid (%s); re-asking once", exc)
        retry = CompletionRequest(req.prompt + _REASK_SUFFIX, req.template, req.request_id + "-retry")
        return parse_seed_dimension(provider.complete_raw(retry))


_FENCE = re.compile(r"^\s*```[a-zA-Z]*\s*$", re.MULTILINE)


def _extract_json(text: str) -> dict:
    cleaned = _FENCE.sub("", text).strip()
    start = cleaned.find("{")
    if start < 0:
        raise MalformedJson("no JSON object in response")
    try:
        obj, _ = json.JSONDecoder().raw_decode(cleaned[start:])
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"response is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise MalformedJson(f"expected a JSON object, got {type(obj).__name__}")
    return obj


def _word_count(text: str) -> int:
    return len(text.split())


def parse_idea_pair(text: str) -> IdeaPair:
    """Validate a raw response against the two-idea gist/full contract."""
    obj = _extract_json(text)
    if "ideas" not in obj or not isinstance(obj["ideas"], list):
        raise MalformedJson('response lacks an "ideas" array')
    items = obj["ideas"]
    if len(items) != 2:
        raise CardinalityViolation(f"expected exactly 2 ideas, got {len(items)}")
    ideas = []
    for item in items:
        if not isinstance(item, dict) or not isinstance(item.get("gist"), str) or not isinstance(item.get("full"), str):
            raise MalformedJson("each idea needs string gist and full fields")
        gist, full = item["gist"].strip(), item["full"].strip()
        if not gist or not full:
            raise MalformedJson("idea gist and full must be non-blank")
        if _word_count(full) > _LENGTH_FULL_WORDS:
            raise LengthViolation(f"idea full text exceeds {_LENGTH_FULL_WORDS} words")
        if _word_count(gist) > _LENGTH_GIST_WORDS:
            logger.warning("idea gist longer than %d words: %r", _LENGTH_GIST_WORDS, gist)
        ideas.append(Idea(gist=gist, full=full))
    if ideas[0].gist == ideas[1].gist:
        raise MalformedJson("idea gists must differ")
    return IdeaPair(ideas=(ideas[0], ideas[1]))


def truncate_words(text: str, limit: int, label: str) -> str:
    words = text.split()
    if len(words) <= limit:
        return text
    logger.warning("%s exceeds %d words; truncating", label, limit)
    return " ".join(words[:limit])


def parse_seed_dimension(text: str) -> SeedDimension:
    """Validate a raw response as {seed, dimension}; dimension defaults."""
    obj = _extract_json(text)
    seed = obj.get("seed")
    if not isinstance(seed, str) or not seed.strip():
        raise MalformedJson("response lacks a non-blank seed")
    dimension = obj.get("dimension")
    if not isinstance(dimension, str) or not dimension.strip():
        dimension = "creativity"
    seed = truncate_words(seed.strip(), _LENGTH_SEED_WORDS, "seed")
    dimension = truncate_words(dimension.strip(), _LENGTH_DIMENSION_WORDS, "dimension")
    return SeedDimension(seed=seed, dimension=dimension)


# --- mock transform rules ---------------------------------------------------

def _between(prompt: str, start: str, end: str) -> str:
    i = prompt.index(start) + len(start)
    j = prompt.index(end, i)
    return prompt[i:j]


def _segment_slice(prompt: str, marker_intro_tail: str) -> str:
    return _between(prompt, marker_intro_tail + "\n", "\n\nYour task")


def _transform_tagged(marked: str, transform) -> str:
    """Apply `transform(segment_text, level)` to each tagged range, last first."""
    parsed = parse_marked(marked)
    plain = parsed.plain
    for tag in sorted(parsed.tags, key=lambda t: t.start, reverse=True):
        replacement = transform(plain[tag.start:tag.end], tag.level)
        plain = plain[:tag.start] + replacement + plain[tag.end:]
    return plain


def _mock_squeeze(prompt: str) -> str:
    marked = _segment_slice(prompt, "emphasize the text):")
    return _transform_tagged(marked, lambda seg, level: seg.upper())


def _mock_stretch(prompt: str) -> str:
    if "Original text:" in prompt:
        original = _between(prompt, "Original text:\n", "\n\nYour task")
        return original + " " + original
    marked = _segment_slice(prompt, "elaborate the text):")
    return _transform_tagged(marked, lambda seg, level: " ".join([seg] * level))


def _keep_first_half(seg: str) -> str:
    words = seg.split()
    keep = (len(words) + 1) // 2
    return " ".join(words[:keep])


def _mock_squash(prompt: str) -> str:
    if "Original text:" in prompt:
        original = _between(prompt, "Original text:\n", "\n\nYour task")
        return _keep_first_half(original)
    marked = _segment_slice(prompt, "we should summarize):")
    return _transform_tagged(marked, lambda seg, level: _keep_first_half(seg))


def _mock_pinch(prompt: str) -> str:
    marked = _segment_slice(prompt, "refinement should be):")
    return _transform_tagged(marked, lambda seg, level: seg + " (specifically)")


def _mock_distort(prompt: str) -> str:
    marked = _segment_slice(prompt, "the smudging is):")
    return _transform_tagged(marked, lambda seg, level: "essence-of-" + seg.split()[0])


def _plain_lines(marked: str) -> list[str]:
    return [parse_marked(line).plain for line in marked.split("\n")]


def _is_overlap_line(line: str) -> bool:
    return line.startswith("<overlap>") and line.endswith("</overlap>")


def _mock_vertical(prompt: str) -> str:
    top = _between(prompt, "Top text block (with overlapping lines tagged):\n",
                   "\n\nBottom text block (with overlapping lines tagged):\n")
    bottom = _between(prompt, "Bottom text block (with overlapping lines tagged):\n", "\n\nYour task")
    top_plain = "\n".join(_plain_lines(top))
    kept = [parse_marked(line).plain for line in bottom.split("\n") if not _is_overlap_line(line)]
    return (top_plain + " " + "\n".join(kept)).strip()


def _mock_full_blend(prompt: str) -> str:
    first = _between(prompt, "First text:\n", "\n\nSecond text:\n")
    second = _between(prompt, "Second text:\n", "\n\nYour task")
    return first + " " + second


def _mock_horizontal(prompt: str) -> str:
    main = _between(prompt, "Main text block (with overlapping lines tagged):\n",
                    "\n\nText to insert (with overlapping lines tagged):\n")
    insert = _between(prompt, "Text to insert (with overlapping lines tagged):\n",
                      "\n\nThe second text MUST be inserted")
    instruction = "The second text MUST be inserted" + _between(
        prompt, "\n\nThe second text MUST be inserted", "\n\nCRITICAL GUIDELINES")
    main_lines = _plain_lines(main)
    insert_plain = "\n".join(_plain_lines(insert))

    anchor_m = re.search(r'around the line: "(.*)", creating a cohesive', instruction, re.DOTALL)
    if anchor_m:
        anchor = anchor_m.group(1)
        out = []
        placed = False
        for line in main_lines:
            out.append(line)
            if not placed and line == anchor:
                out.append(insert_plain)
                placed = True
        if not placed:
            out.append(insert_plain)
        return "\n".join(out)

    pos_m = re.search(r"inserted (beginning|middle|end) of the main text", instruction)
    word = pos_m.group(1) if pos_m else "middle"
    if word == "beginning":
        return insert_plain + " " + "\n".join(main_lines)
    if word == "end":
        return "\n".join(main_lines) + " " + insert_plain
    half = len(main_lines) // 2
    return "\n".join(main_lines[:half] + [insert_plain] + main_lines[half:])


def _mock_idea_pair(prompt: str) -> str:
    seed = _between(prompt, 'What we are generating (the seed): "', '"\n')
    dimension = _between(prompt, 'the dimension to progress in): "', '"\n')
    # next generation = one past the highest index still visible in the
    # priors, so retired ideas are never regenerated verbatim
    generation = 1
    if "PRIOR IDEAS:\n" in prompt:
        block = _between(prompt, "PRIOR IDEAS:\n", "\n\nCRITICAL FORMATTING") \
            if "\n\nCRITICAL FORMATTING" in prompt else _between(prompt, "PRIOR IDEAS:\n", "\n\n")
        seen = [int(m) for m in re.findall(r"idea (\d+)", block)]
        generation = max(seen, default=0) + 1
    g = generation
    gist1 = f"{seed} idea {g} ({dimension} {g})"
    gist2 = f"{seed} idea {g} variant ({dimension} {g})"
    return json.dumps({
        "ideas": [
            {"gist": gist1, "full": f"{gist1}. Exploring {seed} further along the {dimension} axis, generation {g}."},
            {"gist": gist2, "full": f"{gist2}. A second take on {seed} at generation {g} of {dimension}."},
        ]
    })


_VOICE_CANNED = {
    "I want to explore how technology affects human relationships":
        ("technology's impact on human relationships", "digital impact"),
    "Let's think about sustainable energy solutions":
        ("sustainable energy solutions", "sustainability"),
    "Consider the role of art in society":
        ("art in society", "creativity"),
}

_VOICE_FILLERS = ("i want to explore ", "let's think about ", "consider ", "what about ", "ideas about ")


def _mock_voice_plant(prompt: str) -> str:
    transcript = _between(prompt, 'Voice input: "', '"\n\nCRITICAL')
    if transcript in _VOICE_CANNED:
        seed, dimension = _VOICE_CANNED[transcript]
    else:
        seed = transcript.strip().rstrip(".")
        lowered = seed.lower()
        for filler in _VOICE_FILLERS:
            if lowered.startswith(filler):
                seed = seed[len(filler):]
                break
        seed = seed or transcript
        dimension = "creativity"
    return json.dumps({"seed": seed, "dimension": dimension})


def _mock_root_combine(prompt: str) -> str:
    block = _between(prompt, "The ideas to combine:\n", "\n\nAnalyze the patterns")
    items = [ln[2:] if ln.startswith("- ") else ln for ln in block.split("\n") if ln.strip()]
    heads = [" ".join(item.split()[:4]) for item in items]
    seed = "combined: " + "; ".join(heads)
    return json.dumps({"seed": seed, "dimension": "synthesis"})


_MOCK_RULES = {
    Template.SQUEEZE: _mock_squeeze,
    Template.STRETCH: _mock_stretch,
    Template.SQUASH: _mock_squash,
    Template.PINCH: _mock_pinch,
    Template.DISTORT: _mock_distort,
    Template.VERTICAL_COLLISION: _mock_vertical,
    Template.FULL_BLEND: _mock_full_blend,
    Template.HORIZONTAL_COLLISION: _mock_horizontal,
    Template.GENERATE_IDEA_PAIR: _mock_idea_pair,
    Template.INITIAL_IDEA_PAIR: _mock_idea_pair,
    Template.VOICE_PLANT: _mock_voice_plant,
    Template.ROOT_COMBINE: _mock_root_combine,
}
