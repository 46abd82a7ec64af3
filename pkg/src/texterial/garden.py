"""Text-as-plants operations: planting, timed growth of idea pairs,
watering, pruning, preserving, grafting, composting, and leaf editing.

Growth runs off the session clock: each due fern yields exactly one leaf
pair and one dimension checkpoint per tick.  Watering quarters the growth
interval for a fixed window and also pulls in the currently pending growth.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .config import EngineConfig
from .core import ACTIVE_STATUSES, LeafStatus
from .errors import (
    AlreadyPruned,
    BlankInput,
    InvalidState,
    SameFern,
    StaleOperation,
    TexterialError,
    TooFewLeaves,
    UnknownFern,
    UnknownLeaf,
)
from .gateway import (
    CompletionRequest,
    IdeaPair,
    SeedDimension,
    complete_idea_pair,
    complete_seed_dimension,
    truncate_words,
)
from .geometry import FernExtent, water_targets
from .prompts import PromptRequest, Template, build, root_network_block, serialize_prior_ideas
from .session import Fern, GraftRef, Leaf, Session

logger = logging.getLogger(__name__)

SEED_WORD_LIMIT = 120
DIMENSION_WORD_LIMIT = 12


@dataclass(frozen=True)
class SeedJob:
    """A staged provider call that will seed a new fern on completion."""

    op_id: str
    kind: str  # "plant" | "compost"
    template: Template
    prompt: str
    x: float
    y: float
    leaf_ids: tuple[str, ...]
    generation: int


@dataclass(frozen=True)
class GrowthJob:
    """A staged idea-pair request for one due fern."""

    op_id: str
    fern_id: str
    template: Template
    prompt: str
    generation: int


def _require_fern(session: Session, fern_id: str | None) -> Fern:
    if not fern_id or fern_id not in session.ferns:
        raise UnknownFern(f"no fern {fern_id!r}")
    return session.ferns[fern_id]


def _require_leaf(session: Session, leaf_id: str | None) -> Leaf:
    if not leaf_id or leaf_id not in session.leaves:
        raise UnknownLeaf(f"no leaf {leaf_id!r}")
    return session.leaves[leaf_id]


def active_leaves(session: Session, fern: Fern) -> list[Leaf]:
    """Live leaves in generation order (pruned/grafted/composted excluded)."""
    return [
        session.leaves[lid]
        for lid in fern.leaf_ids
        if session.leaves[lid].status in ACTIVE_STATUSES
    ]


def _create_fern(session: Session, seed: str, dimension: str, x: float, y: float,
                 cfg: EngineConfig) -> Fern:
    seed = truncate_words(seed.strip(), SEED_WORD_LIMIT, "seed")
    dimension = dimension.strip() or "creativity"
    dimension = truncate_words(dimension, DIMENSION_WORD_LIMIT, "dimension")
    now = session.clock_ms
    fern = Fern(
        id=session.next_id("fern"),
        seed_text=seed,
        dimension=dimension,
        x=x, y=y,
        base_interval_ms=cfg.garden.base_interval_ms,
        next_due=now + cfg.garden.base_interval_ms,
        planted_at=now,
    )
    session.ferns[fern.id] = fern
    return fern


def plant_direct(session: Session, seed: str, dimension: str, x: float, y: float,
                 cfg: EngineConfig) -> Fern:
    """Plant from explicit seed/dimension text and commit."""
    if not seed or not seed.strip():
        raise BlankInput("seed text is blank")
    fern = _create_fern(session, seed, dimension, x, y, cfg)
    session.commit(f"plant:{fern.id}")
    return fern


def prepare_plant(session: Session, transcript: str, x: float, y: float) -> "SeedJob":
    """Stage a voice planting: build and log the extraction prompt."""
    if not transcript or not transcript.strip():
        raise BlankInput("transcript is blank")
    prompt = build(PromptRequest(Template.VOICE_PLANT, {"transcript": transcript},
                                 context=session.writing_context))
    session.log_prompt(Template.VOICE_PLANT.value, prompt)
    return SeedJob(
        op_id=session.next_op_id(),
        kind="plant",
        template=Template.VOICE_PLANT,
        prompt=prompt,
        x=x, y=y,
        leaf_ids=(),
        generation=session.generation,
    )


def finish_plant(session: Session, job: "SeedJob", sd: SeedDimension, cfg: EngineConfig) -> Fern:
    """Create the fern from the extracted seed/dimension and commit."""
    if job.generation != session.generation:
        raise StaleOperation(f"{job.op_id} superseded by undo/redo")
    fern = _create_fern(session, sd.seed, sd.dimension, job.x, job.y, cfg)
    session.commit(f"plant:{fern.id}")
    return fern


def plant_voice(session: Session, transcript: str, x: float, y: float,
                provider, cfg: EngineConfig) -> Fern:
    """Plant from a voice transcript via the seed/dimension extraction prompt."""
    job = prepare_plant(session, transcript, x, y)
    req = CompletionRequest(job.prompt, job.template, job.op_id)
    sd = complete_seed_dimension(provider, req)
    return finish_plant(session, job, sd, cfg)


def _effective_interval(fern: Fern, now: int, cfg: EngineConfig) -> int:
    if fern.watered_until is not None and now < fern.watered_until:
        return int(fern.base_interval_ms / cfg.garden.water_factor)
    return fern.base_interval_ms


def _growth_prompt(session: Session, fern: Fern) -> tuple[Template, str]:
    root = root_network_block([g.full for g in fern.grafted_history])
    if not fern.leaf_ids:
        template = Template.INITIAL_IDEA_PAIR
        prompt = build(PromptRequest(template, {
            "seed": fern.seed_text,
            "dimension": fern.dimension,
            "root_context": root,
        }, context=session.writing_context))
    else:
        template = Template.GENERATE_IDEA_PAIR
        prompt = build(PromptRequest(template, {
            "seed": fern.seed_text,
            "dimension": fern.dimension,
            "existing_ideas": serialize_prior_ideas(active_leaves(session, fern)),
            "root_context": root,
        }, context=session.writing_context))
    return template, prompt


def collect_growth(session: Session, cfg: EngineConfig) -> list[GrowthJob]:
    """Stage one growth job per due fern and schedule each fern's next one.

    The reschedule happens here so overlapping clock ticks never double-book
    a fern, and so a failed provider call still postpones the retry.
    """
    now = session.clock_ms
    jobs = []
    for fern in session.ferns.values():
        if fern.next_due > now:
            continue
        template, prompt = _growth_prompt(session, fern)
        session.log_prompt(template.value, prompt)
        fern.next_due = now + _effective_interval(fern, now, cfg)
        jobs.append(GrowthJob(
            op_id=session.next_op_id(),
            fern_id=fern.id,
            template=template,
            prompt=prompt,
            generation=session.generation,
        ))
    return jobs


def apply_growth(session: Session, job: GrowthJob, pair: IdeaPair) -> dict | None:
    """Append the grown leaf pair and its checkpoint; None if superseded."""
    fern = session.ferns.get(job.fern_id)
    if fern is None or job.generation != session.generation:
        logger.warning("dropping stale growth for %s", job.fern_id)
        return None
    leaf_ids = []
    for idea in pair.ideas:
        leaf = Leaf(
            id=session.next_id("leaf"),
            fern_id=fern.id,
            gist=idea.gist,
            full=idea.full,
            born_at=session.clock_ms,
        )
        session.leaves[leaf.id] = leaf
        fern.leaf_ids.append(leaf.id)
        leaf_ids.append(leaf.id)
    fern.checkpoints.append((leaf_ids[0], leaf_ids[1]))
    checkpoint_index = len(fern.checkpoints) - 1
    session.commit(f"tick:{fern.id}:{checkpoint_index}")
    return {"fern_id": fern.id, "checkpoint_index": checkpoint_index, "leaf_ids": leaf_ids}


def tick(session: Session, provider, cfg: EngineConfig) -> list[dict]:
    """Grow every due fern once; per-fern failures never stall the others."""
    grown = []
    for job in collect_growth(session, cfg):
        try:
            pair = complete_idea_pair(provider, CompletionRequest(job.prompt, job.template, job.op_id))
        except TexterialError as exc:
            logger.warning("fern %s growth failed: %s", job.fern_id, exc)
            session.log_interaction("tick", job.fern_id, f"failed:{type(exc).__name__}")
            continue
        result = apply_growth(session, job, pair)
        if result is not None:
            grown.append(result)
    return grown


def water(session: Session, stroke: list[tuple[float, float]], cfg: EngineConfig) -> list[str]:
    """Water the ferns under the stroke; speeds up and reschedules growth."""
    extents = [
        FernExtent(f.id, f.x - cfg.garden.fern_half_width, f.x + cfg.garden.fern_half_width, f.y)
        for f in session.ferns.values()
    ]
    ids = water_targets(stroke, extents)
    now = session.clock_ms
    for fid in ids:
        fern = session.ferns[fid]
        deadline = now + cfg.garden.water_window_ms
        fern.watered_until = max(fern.watered_until or 0, deadline)
        fast = now + int(fern.base_interval_ms / cfg.garden.water_factor)
        fern.next_due = min(fern.next_due, fast)
    if ids:
        session.commit("water:" + ",".join(ids))
    return ids


def prune(session: Session, leaf_id: str) -> Leaf:
    """Retire an idea; it stays in history but leaves every future prompt."""
    leaf = _require_leaf(session, leaf_id)
    if leaf.status is LeafStatus.PRUNED:
        raise AlreadyPruned(f"leaf {leaf_id} already pruned")
    if leaf.status not in ACTIVE_STATUSES:
        raise InvalidState(f"cannot prune a {leaf.status.value} leaf")
    leaf.status = LeafStatus.PRUNED
    session.commit(f"prune:{leaf_id}")
    return leaf


def preserve(session: Session, leaf_id: str) -> Leaf:
    """Highlight a promising idea; still counts as live for prompts."""
    leaf = _require_leaf(session, leaf_id)
    if leaf.status is LeafStatus.PRESERVED:
        return leaf
    if leaf.status is not LeafStatus.ACTIVE:
        raise InvalidState(f"cannot preserve a {leaf.status.value} leaf")
    leaf.status = LeafStatus.PRESERVED
    session.commit(f"preserve:{leaf_id}")
    return leaf


def graft(session: Session, leaf_id: str, target_fern_id: str) -> Fern:
    """Move a leaf's lineage into another fern's root network."""
    leaf = _require_leaf(session, leaf_id)
    if leaf.status not in ACTIVE_STATUSES:
        raise InvalidState(f"cannot graft a {leaf.status.value} leaf")
    target = _require_fern(session, target_fern_id)
    if target.id == leaf.fern_id:
        raise SameFern("cannot graft a leaf onto its own fern")
    leaf.status = LeafStatus.GRAFTED
    target.grafted_history.append(GraftRef(leaf.id, leaf.fern_id, leaf.full))
    session.commit(f"graft:{leaf_id}->{target.id}")
    return target


def prepare_compost(session: Session, leaf_ids: list[str], x: float, y: float) -> SeedJob:
    """Stage the root-combine call for a set of live leaves."""
    if len(leaf_ids) < 2:
        raise TooFewLeaves("composting needs at least two leaves")
    chosen = [_require_leaf(session, lid) for lid in leaf_ids]
    for leaf in chosen:
        if leaf.status not in ACTIVE_STATUSES:
            raise InvalidState(f"cannot compost a {leaf.status.value} leaf")
    ideas = "\n".join(f"- {leaf.full}" for leaf in chosen)
    prompt = build(PromptRequest(Template.ROOT_COMBINE, {"ideas": ideas},
                                 context=session.writing_context))
    session.log_prompt(Template.ROOT_COMBINE.value, prompt)
    return SeedJob(
        op_id=session.next_op_id(),
        kind="compost",
        template=Template.ROOT_COMBINE,
        prompt=prompt,
        x=x, y=y,
        leaf_ids=tuple(leaf_ids),
        generation=session.generation,
    )


def finish_compost(session: Session, job: SeedJob, sd: SeedDimension, cfg: EngineConfig) -> Fern:
    """Retire the source leaves and plant the synthesized seed."""
    if job.generation != session.generation:
        raise StaleOperation(f"{job.op_id} superseded by undo/redo")
    chosen = [_require_leaf(session, lid) for lid in job.leaf_ids]
    for leaf in chosen:
        if leaf.status not in ACTIVE_STATUSES:
            raise InvalidState(f"cannot compost a {leaf.status.value} leaf")
    for leaf in chosen:
        leaf.status = LeafStatus.COMPOSTED
    fern = _create_fern(session, sd.seed, sd.dimension, job.x, job.y, cfg)
    session.commit(f"compost:{fern.id}")
    return fern


def compost(session: Session, leaf_ids: list[str], x: float, y: float,
            provider, cfg: EngineConfig) -> Fern:
    """Recombine several leaves into a fresh seed and plant it."""
    job = prepare_compost(session, leaf_ids, x, y)
    req = CompletionRequest(job.prompt, job.template, job.op_id)
    sd = complete_seed_dimension(provider, req)
    return finish_compost(session, job, sd, cfg)


def replant_leaf(session: Session, leaf_id: str, x: float, y: float,
                 cfg: EngineConfig) -> Fern:
    """Drop a single plucked leaf on the soil: it grows on as a new fern."""
    leaf = _require_leaf(session, leaf_id)
    if leaf.status not in ACTIVE_STATUSES:
        raise InvalidState(f"cannot replant a {leaf.status.value} leaf")
    source = session.ferns[leaf.fern_id]
    leaf.status = LeafStatus.GRAFTED
    fern = _create_fern(session, leaf.full, source.dimension, x, y, cfg)
    fern.grafted_history.append(GraftRef(leaf.id, source.id, leaf.full))
    session.commit(f"replant:{leaf_id}->{fern.id}")
    return fern


def edit_leaf(session: Session, leaf_id: str, gist: str | None = None,
              full: str | None = None) -> Leaf:
    """Rewrite a leaf's text; later prompts pick up the edit."""
    leaf = _require_leaf(session, leaf_id)
    if leaf.status in (LeafStatus.PRUNED, LeafStatus.COMPOSTED):
        raise InvalidState(f"cannot edit a {leaf.status.value} leaf")
    if gist is None and full is None:
        raise BlankInput("nothing to edit")
    if gist is not None:
        if not gist.strip():
            raise BlankInput("gist is blank")
        leaf.gist = truncate_words(gist.strip(), 15, "gist")
    if full is not None:
        if not full.strip():
            raise BlankInput("full text is blank")
        leaf.full = truncate_words(full.strip(), 120, "full")
    session.commit(f"edit_leaf:{leaf_id}")
    return leaf
