"""Session-scoped HTTP + server-sent-events API.

One command queue per session: gesture POSTs validate and stage work under
the session lock, return 202 immediately, and a per-session worker thread
runs the provider call and commits.  Completions, failures and garden
growth fan out on the session's SSE stream.  Sessions persist to the data
directory after every commit.
"""

from __future__ import annotations

import contextlib
import json
import logging
import queue
import threading
import time
import uuid
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse, PlainTextResponse, StreamingResponse
from pydantic import BaseModel

from . import engine
from .config import EngineConfig
from .core import GestureEvent
from .errors import (
    Busy,
    NothingToRedo,
    NothingToUndo,
    ProviderError,
    ProviderTimeout,
    TexterialError,
)
from .garden import SeedJob
from .gateway import make_provider
from .persistence import persist_session
from .session import PendingOp, Session
from .trace import dump_trace

logger = logging.getLogger(__name__)

_BAD_REQUEST_ERRORS = (
    "BlankInput", "UnknownBlock", "NoTarget", "NoCollision", "DegenerateSplit",
    "UnknownLeaf", "UnknownFern", "AlreadyPruned", "InvalidState", "SameFern",
    "TooFewLeaves", "MisalignedRange", "MissingSlot", "UnknownTemplate",
)


def _status_for(exc: Exception) -> int:
    name = type(exc).__name__
    if isinstance(exc, (Busy, NothingToUndo, NothingToRedo)):
        return 409
    if isinstance(exc, (ProviderError, ProviderTimeout)):
        return 503
    if name in _BAD_REQUEST_ERRORS or isinstance(exc, ValueError):
        return 400
    return 500


class SessionRuntime:
    """A session plus its lock, worker queue, and SSE subscribers."""

    def __init__(self, session: Session):
        self.session = session
        self.lock = threading.RLock()
        self.jobs: queue.Queue = queue.Queue()
        self.subscribers: list[queue.Queue] = []
        self.worker: threading.Thread | None = None

    def broadcast(self, event_type: str, data: dict) -> None:
        payload = (event_type, data)
        for q in list(self.subscribers):
            with contextlib.suppress(queue.Full):
                q.put_nowait(payload)

    def subscribe(self) -> queue.Queue:
        q: queue.Queue = queue.Queue(maxsize=256)
        self.subscribers.append(q)
        return q

    def unsubscribe(self, q: queue.Queue) -> None:
        with contextlib.suppress(ValueError):
            self.subscribers.remove(q)


class SessionManager:
    def __init__(self, cfg: EngineConfig, data_dir: str | Path, clock_mode: str = "wall"):
        self.cfg = cfg
        self.data_dir = Path(data_dir)
        self.clock_mode = clock_mode
        self.provider = make_provider(cfg.provider)
        self.runtimes: dict[str, SessionRuntime] = {}
        self._stop = threading.Event()
        self._started_at = time.monotonic()
        self._clock_thread: threading.Thread | None = None
        if clock_mode == "wall":
            self._clock_thread = threading.Thread(target=self._clock_loop, daemon=True)
            self._clock_thread.start()

    # -- lifecycle -----------------------------------------------------------

    def create(self, writing_context: str | None) -> SessionRuntime:
        session = Session(uuid.uuid4().hex[:12], writing_context)
        rt = SessionRuntime(session)
        rt.worker = threading.Thread(target=self._work_loop, args=(rt,), daemon=True)
        rt.worker.start()
        self.runtimes[session.session_id] = rt
        self._persist(rt)
        return rt

    def get(self, session_id: str) -> SessionRuntime | None:
        return self.runtimes.get(session_id)

    def delete(self, session_id: str) -> bool:
        rt = self.runtimes.pop(session_id, None)
        if rt is None:
            return False
        rt.jobs.put(None)
        self._persist(rt)
        return True

    def shutdown(self) -> None:
        self._stop.set()
        for rt in list(self.runtimes.values()):
            rt.jobs.put(None)
            self._persist(rt)
        self.runtimes.clear()

    # -- workers ---------------------------------------------------------------
    #
    # One command queue per session. Provider calls run on the worker thread
    # outside the session lock, so readers and new gestures never wait on
    # model latency; mutations happen under the lock.

    def _work_loop(self, rt: SessionRuntime) -> None:
        while True:
            job = rt.jobs.get()
            if job is None:
                return
            kind, payload = job
            if kind == "op":
                self._finish_op(rt, *payload)
            elif kind == "tick":
                self._run_tick_job(rt, payload)

    def _finish_op(self, rt: SessionRuntime, op, event: GestureEvent | None) -> None:
        try:
            resolved = engine.resolve(op, self.provider)
        except TexterialError as exc:
            with rt.lock:
                engine.fail_pending(rt.session, op, exc)
            rt.broadcast("op_failed", {
                "op_id": op.op_id, "error": type(exc).__name__, "detail": str(exc)})
            return
        try:
            with rt.lock:
                outcome = engine.apply_resolved(rt.session, op, resolved, self.cfg)
                engine.record_commit(rt.session, "gesture", event)
                snap = rt.session.snapshots[-1]
                payload = {
                    "op_id": op.op_id,
                    "block_id": outcome.block_id,
                    "fern_id": outcome.fern_id,
                    "diff": outcome.diff,
                    "sequence": snap.sequence,
                    "hash": snap.hash,
                }
        except TexterialError as exc:
            with rt.lock:
                engine.fail_pending(rt.session, op, exc)
            rt.broadcast("op_failed", {
                "op_id": op.op_id, "error": type(exc).__name__, "detail": str(exc)})
            return
        rt.broadcast("op_completed", payload)
        self._persist(rt)

    def _run_tick_job(self, rt: SessionRuntime, now_ms: int) -> None:
        from .gateway import CompletionRequest, complete_idea_pair
        from .garden import apply_growth, collect_growth

        with rt.lock:
            rt.session.clock_ms = max(rt.session.clock_ms, now_ms)
            jobs = collect_growth(rt.session, self.cfg)
        grown = []
        for job in jobs:
            try:
                pair = complete_idea_pair(
                    self.provider, CompletionRequest(job.prompt, job.template, job.op_id))
            except TexterialError as exc:
                logger.warning("growth failed for %s: %s", job.fern_id, exc)
                continue
            with rt.lock:
                result = apply_growth(rt.session, job, pair)
                if result is not None:
                    engine.record_commit(rt.session, "clock")
            if result is not None:
                grown.append(result)
        for g in grown:
            rt.broadcast("fern_grown", g)
        if grown:
            self._persist(rt)

    def _clock_loop(self) -> None:
        while not self._stop.wait(0.25):
            now_ms = int((time.monotonic() - self._started_at) * 1000)
            for rt in list(self.runtimes.values()):
                rt.jobs.put(("tick", now_ms))

    def advance_clock(self, rt: SessionRuntime, ms: int) -> list[dict]:
        """Scripted-clock path: synchronous, deterministic, mock-friendly."""
        with rt.lock:
            rt.session.clock_ms += ms
            grown = engine.run_tick(rt.session, self.provider, self.cfg)
        for g in grown:
            rt.broadcast("fern_grown", g)
        if grown:
            self._persist(rt)
        return grown

    def _persist(self, rt: SessionRuntime) -> None:
        try:
            with rt.lock:
                persist_session(rt.session, self.data_dir / f"{rt.session.session_id}.json")
                log_path = self.data_dir / f"{rt.session.session_id}.log.jsonl"
                log_path.write_text(
                    "".join(json.dumps(e, ensure_ascii=False) + "\n"
                            for e in rt.session.interaction_log),
                    encoding="utf-8",
                )
        except OSError as exc:
            logger.error("persist failed for %s: %s", rt.session.session_id, exc)


class CreateSessionBody(BaseModel):
    writing_context: str | None = None


class ClockBody(BaseModel):
    advance_ms: int


def session_view(session: Session) -> dict:
    return {
        "session_id": session.session_id,
        "writing_context": session.writing_context,
        "clock_ms": session.clock_ms,
        "sequence": session.snapshots[-1].sequence,
        "hash": session.snapshots[-1].hash,
        "blocks": [
            {"id": b.id, "text": b.text, "x": b.x, "y": b.y, "w": b.w, "h": b.h,
             "origin": b.origin.value, "busy": b.busy}
            for b in session.blocks.values()
        ],
        "ferns": [
            {**f.to_state(),
             "leaves": [session.leaves[lid].to_state() for lid in f.leaf_ids]}
            for f in session.ferns.values()
        ],
    }


def create_app(cfg: EngineConfig | None = None, data_dir: str | Path = "./data",
               clock_mode: str = "wall") -> FastAPI:
    cfg = cfg or EngineConfig.from_env()
    manager = SessionManager(cfg, data_dir, clock_mode=clock_mode)

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        manager.shutdown()

    app = FastAPI(title="texterial", version="0.1.0", lifespan=lifespan)
    app.state.manager = manager

    def _not_found() -> JSONResponse:
        return JSONResponse({"error": "unknown session"}, status_code=404)

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody | None = None):
        rt = manager.create(body.writing_context if body else None)
        return session_view(rt.session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        rt = manager.get(session_id)
        if rt is None:
            return _not_found()
        with rt.lock:
            return session_view(rt.session)

    @app.delete("/sessions/{session_id}", status_code=204)
    def delete_session(session_id: str):
        if not manager.delete(session_id):
            return _not_found()
        return Response(status_code=204)

    @app.post("/sessions/{session_id}/gestures", status_code=202)
    def post_gesture(session_id: str, body: dict):
        rt = manager.get(session_id)
        if rt is None:
            return _not_found()
        try:
            event = GestureEvent.from_dict(body)
        except (KeyError, ValueError, TypeError) as exc:
            return JSONResponse({"error": "invalid event", "detail": str(exc)}, status_code=400)
        if not manager.provider.available:
            return JSONResponse({"error": "provider unavailable"}, status_code=503)
        try:
            with rt.lock:
                result = engine.submit(rt.session, event, manager.provider, manager.cfg)
                if isinstance(result, (PendingOp, SeedJob)):
                    rt.jobs.put(("op", (result, event)))
                    return {"operation_id": result.op_id, "status": "accepted"}
                if result is not None and result.committed:
                    engine.record_commit(rt.session, "gesture", event)
                    snap = rt.session.snapshots[-1]
                    payload = {
                        "op_id": f"sync-{snap.sequence}",
                        "block_id": result.block_id,
                        "fern_id": result.fern_id,
                        "diff": result.diff,
                        "sequence": snap.sequence,
                        "hash": snap.hash,
                        "detail": result.detail,
                    }
                else:
                    payload = None
        except TexterialError as exc:
            return JSONResponse({"error": type(exc).__name__, "detail": str(exc)},
                                status_code=_status_for(exc))
        except ValueError as exc:
            return JSONResponse({"error": "invalid event", "detail": str(exc)}, status_code=400)
        if payload is not None:
            rt.broadcast("op_completed", payload)
            manager._persist(rt)
            return {"operation_id": payload["op_id"], "status": "completed", "result": payload}
        return {"operation_id": None, "status": "ignored"}

    @app.post("/sessions/{session_id}/undo")
    def undo(session_id: str):
        return _history(session_id, engine.do_undo)

    @app.post("/sessions/{session_id}/redo")
    def redo(session_id: str):
        return _history(session_id, engine.do_redo)

    def _history(session_id: str, fn):
        rt = manager.get(session_id)
        if rt is None:
            return _not_found()
        try:
            with rt.lock:
                snap = fn(rt.session)
        except TexterialError as exc:
            return JSONResponse({"error": type(exc).__name__, "detail": str(exc)},
                                status_code=_status_for(exc))
        manager._persist(rt)
        return {"sequence": snap.sequence, "hash": snap.hash}

    @app.post("/sessions/{session_id}/clock")
    def clock(session_id: str, body: ClockBody):
        if manager.clock_mode != "simulated":
            return JSONResponse({"error": "clock endpoint requires --clock simulated"},
                                status_code=400)
        rt = manager.get(session_id)
        if rt is None:
            return _not_found()
        if body.advance_ms < 0:
            return JSONResponse({"error": "advance_ms must be >= 0"}, status_code=400)
        grown = manager.advance_clock(rt, body.advance_ms)
        with rt.lock:
            return {"clock_ms": rt.session.clock_ms, "grown": grown}

    @app.get("/sessions/{session_id}/trace")
    def get_trace(session_id: str):
        rt = manager.get(session_id)
        if rt is None:
            return _not_found()
        with rt.lock:
            return PlainTextResponse(dump_trace(rt.session), media_type="application/x-ndjson")

    @app.get("/sessions/{session_id}/events")
    def events(session_id: str, request: Request, max_events: int = 0, timeout_s: float = 0.0):
        rt = manager.get(session_id)
        if rt is None:
            return _not_found()
        q = rt.subscribe()

        def stream():
            sent = 0
            deadline = time.monotonic() + timeout_s if timeout_s else None
            try:
                yield ": connected\n\n"
                while True:
                    remaining = 15.0
                    if deadline is not None:
                        remaining = min(remaining, deadline - time.monotonic())
                        if remaining <= 0:
                            return
                    try:
                        event_type, data = q.get(timeout=max(0.01, remaining))
                    except queue.Empty:
                        if deadline is not None and time.monotonic() >= deadline:
                            return
                        yield ": keepalive\n\n"
                        continue
                    yield f"event: {event_type}\ndata: {json.dumps(data, ensure_ascii=False)}\n\n"
                    sent += 1
                    if max_events and sent >= max_events:
                        return
            finally:
                rt.unsubscribe(q)

        return StreamingResponse(stream(), media_type="text/event-stream")

    return app
