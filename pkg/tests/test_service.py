import json
import threading
import time

import httpx
import pytest
import uvicorn
from fastapi.testclient import TestClient

from texterial.config import EngineConfig
from texterial.service import create_app


@pytest.fixture
def client(tmp_path):
    app = create_app(EngineConfig(), data_dir=tmp_path, clock_mode="simulated")
    with TestClient(app) as c:
        yield c


@pytest.fixture
def slow_client(tmp_path):
    cfg = EngineConfig().with_provider(mock_delay_ms=400)
    app = create_app(cfg, data_dir=tmp_path, clock_mode="simulated")
    with TestClient(app) as c:
        yield c


class LiveServer:
    """Real uvicorn server on an ephemeral port; TestClient buffers SSE."""

    def __init__(self, app):
        config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
        self.server = uvicorn.Server(config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)

    def __enter__(self):
        self.thread.start()
        deadline = time.monotonic() + 10
        while not self.server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("uvicorn did not start")
            time.sleep(0.01)
        port = self.server.servers[0].sockets[0].getsockname()[1]
        self.client = httpx.Client(base_url=f"http://127.0.0.1:{port}", timeout=10.0)
        return self.client

    def __exit__(self, *exc):
        self.client.close()
        self.server.should_exit = True
        self.thread.join(timeout=5)


@pytest.fixture
def sse_client(tmp_path):
    app = create_app(EngineConfig(), data_dir=tmp_path / "sse", clock_mode="simulated")
    with LiveServer(app) as c:
        yield c


def make_session(client, context=None):
    resp = client.post("/sessions", json={"writing_context": context})
    assert resp.status_code == 201
    return resp.json()["session_id"]


def add_block_via_voice(client, sid, text, x=40.0, y=40.0):
    resp = client.post(f"/sessions/{sid}/gestures", json={
        "kind": "voice_utterance", "points": [[x, y, 0.0]], "payload": text})
    assert resp.status_code == 202, resp.text
    return resp.json()


def pinch_event(block_id, cx, cy, initial=20.0, final=10.0):
    h0, h1 = initial / 2, final / 2
    return {
        "kind": "pinch", "target": block_id,
        "points": [[cx - h0, cy, 0.0], [cx + h0, cy, 0.0],
                   [cx - h1, cy, 200.0], [cx + h1, cy, 200.0]],
    }


class SseCollector:
    """Background SSE reader against a real server."""

    def __init__(self, client, sid, max_events=1, timeout_s=8.0):
        self.url = (f"/sessions/{sid}/events?max_events={max_events}"
                    f"&timeout_s={timeout_s}")
        self.client = client
        self.events = []
        self.connected = threading.Event()
        self.thread = threading.Thread(target=self._run, daemon=True)

    def _run(self):
        current = None
        with self.client.stream("GET", self.url) as resp:
            for line in resp.iter_lines():
                if line.startswith(": connected"):
                    self.connected.set()
                elif line.startswith("event:"):
                    current = line.split(":", 1)[1].strip()
                elif line.startswith("data:"):
                    self.events.append((current, json.loads(line.split(":", 1)[1])))

    def __enter__(self):
        self.thread.start()
        assert self.connected.wait(5.0), "SSE stream never connected"
        return self

    def __exit__(self, *exc):
        self.thread.join(timeout=12.0)


class TestSessionLifecycle:
    def test_create_then_get_empty_state(self, client):
        sid = make_session(client)
        state = client.get(f"/sessions/{sid}").json()
        assert state["blocks"] == []
        assert state["ferns"] == []
        assert state["sequence"] == 0

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/missing").status_code == 404
        assert client.post("/sessions/missing/undo").status_code == 404
        assert client.delete("/sessions/missing").status_code == 404

    def test_delete_session(self, client):
        sid = make_session(client)
        assert client.delete(f"/sessions/{sid}").status_code == 204
        assert client.get(f"/sessions/{sid}").status_code == 404

    def test_writing_context_round_trips(self, client):
        sid = make_session(client, context="my novel")
        assert client.get(f"/sessions/{sid}").json()["writing_context"] == "my novel"


class TestGestures:
    def test_voice_adds_block(self, client):
        sid = make_session(client)
        add_block_via_voice(client, sid, "Once upon a time")
        state = client.get(f"/sessions/{sid}").json()
        assert [b["text"] for b in state["blocks"]] == ["Once upon a time"]
        assert state["sequence"] == 1

    def test_invalid_event_400(self, client):
        sid = make_session(client)
        resp = client.post(f"/sessions/{sid}/gestures", json={"kind": "no_such_kind"})
        assert resp.status_code == 400

    def test_unknown_block_400(self, client):
        sid = make_session(client)
        resp = client.post(f"/sessions/{sid}/gestures",
                           json=pinch_event("missing", 10, 10))
        assert resp.status_code == 400

    def test_async_gesture_accepted_then_completed(self, sse_client):
        sid = make_session(sse_client)
        add_block_via_voice(sse_client, sid, "The weather was bad that night.")
        block = sse_client.get(f"/sessions/{sid}").json()["blocks"][0]
        with SseCollector(sse_client, sid) as sse:
            resp = sse_client.post(f"/sessions/{sid}/gestures",
                                   json=pinch_event(block["id"], block["x"] + 60, block["y"] + 8))
            assert resp.status_code == 202
            op_id = resp.json()["operation_id"]
        assert sse.events, "no op_completed arrived"
        event_type, data = sse.events[0]
        assert event_type == "op_completed"
        assert data["op_id"] == op_id
        assert data["diff"]["spans"]
        state = sse_client.get(f"/sessions/{sid}").json()
        assert "(specifically)" in state["blocks"][0]["text"]

    def test_busy_block_409(self, slow_client):
        sid = make_session(slow_client)
        add_block_via_voice(slow_client, sid, "The weather was bad that night.")
        block = slow_client.get(f"/sessions/{sid}").json()["blocks"][0]
        gesture = pinch_event(block["id"], block["x"] + 60, block["y"] + 8)
        first = slow_client.post(f"/sessions/{sid}/gestures", json=gesture)
        assert first.status_code == 202
        second = slow_client.post(f"/sessions/{sid}/gestures", json=gesture)
        assert second.status_code == 409
        deadline = time.monotonic() + 5
        while time.monotonic() < deadline:
            if not slow_client.get(f"/sessions/{sid}").json()["blocks"][0]["busy"]:
                break
            time.sleep(0.05)
        else:
            pytest.fail("operation never completed")

    def test_rip_completes_inline(self, client):
        sid = make_session(client)
        add_block_via_voice(client, sid, "First. Second.")
        block = client.get(f"/sessions/{sid}").json()["blocks"][0]
        resp = client.post(f"/sessions/{sid}/gestures", json={
            "kind": "rip", "target": block["id"],
            "points": [[block["x"] + 20, block["y"] + 8, 0.0],
                       [block["x"] + 60, block["y"] + 8, 100.0]]})
        assert resp.status_code == 202
        assert resp.json()["status"] == "completed"
        texts = sorted(b["text"] for b in client.get(f"/sessions/{sid}").json()["blocks"])
        assert texts == ["First. ", "Second."]


class TestUndoRedoEndpoints:
    def test_undo_redo_round_trip(self, client):
        sid = make_session(client)
        base = client.get(f"/sessions/{sid}").json()["hash"]
        add_block_via_voice(client, sid, "hello world")
        after = client.get(f"/sessions/{sid}").json()["hash"]
        undone = client.post(f"/sessions/{sid}/undo")
        assert undone.status_code == 200
        assert undone.json()["hash"] == base
        redone = client.post(f"/sessions/{sid}/redo")
        assert redone.json()["hash"] == after

    def test_undo_empty_409(self, client):
        sid = make_session(client)
        assert client.post(f"/sessions/{sid}/undo").status_code == 409


class TestGarden:
    def test_plant_and_scripted_growth_via_sse(self, sse_client):
        sid = make_session(sse_client)
        resp = sse_client.post(f"/sessions/{sid}/gestures", json={
            "kind": "plant_press", "points": [[600.0, 500.0, 600.0]],
            "payload": "Consider the role of art in society"})
        assert resp.status_code == 202
        assert resp.json()["status"] == "accepted"  # planting completes async
        deadline = time.monotonic() + 5
        while time.monotonic() < deadline:
            ferns = sse_client.get(f"/sessions/{sid}").json()["ferns"]
            if ferns:
                break
            time.sleep(0.05)
        else:
            pytest.fail("fern never appeared")
        fern = ferns[0]
        assert fern["seed_text"] == "art in society"
        with SseCollector(sse_client, sid) as sse:
            clock = sse_client.post(f"/sessions/{sid}/clock", json={"advance_ms": 45_000})
            assert clock.status_code == 200
            assert len(clock.json()["grown"]) == 1
        assert sse.events and sse.events[0][0] == "fern_grown"
        data = sse.events[0][1]
        assert data["fern_id"] == fern["id"]
        assert len(data["leaf_ids"]) == 2
        state = sse_client.get(f"/sessions/{sid}").json()
        assert len(state["ferns"][0]["leaves"]) == 2

    def test_clock_endpoint_rejected_in_wall_mode(self, tmp_path):
        app = create_app(EngineConfig(), data_dir=tmp_path / "wall", clock_mode="wall")
        with TestClient(app) as wall_client:
            sid = make_session(wall_client)
            resp = wall_client.post(f"/sessions/{sid}/clock", json={"advance_ms": 10})
            assert resp.status_code == 400

    def test_wall_clock_grows_ferns_in_background(self, tmp_path):
        from dataclasses import replace
        cfg = EngineConfig()
        cfg = replace(cfg, garden=replace(cfg.garden, base_interval_ms=300))
        app = create_app(cfg, data_dir=tmp_path / "wallgrow", clock_mode="wall")
        with LiveServer(app) as client:
            sid = make_session(client)
            client.post(f"/sessions/{sid}/gestures", json={
                "kind": "plant_press", "points": [[600.0, 500.0, 600.0]],
                "payload": "Consider the role of art in society"})
            deadline = time.monotonic() + 6
            while time.monotonic() < deadline:
                ferns = client.get(f"/sessions/{sid}").json()["ferns"]
                if ferns and ferns[0]["leaves"]:
                    break
                time.sleep(0.1)
            else:
                pytest.fail("background clock never grew the fern")
            assert len(ferns[0]["leaves"]) >= 2


class TestProviderFailure:
    def test_unconfigured_live_provider_503(self, tmp_path):
        cfg = EngineConfig().with_provider(provider="live", base_url="")
        app = create_app(cfg, data_dir=tmp_path, clock_mode="simulated")
        with TestClient(app) as c:
            sid = make_session(c)
            resp = c.post(f"/sessions/{sid}/gestures", json={
                "kind": "voice_utterance", "points": [[40.0, 40.0, 0.0]], "payload": "hi"})
            assert resp.status_code == 503


class TestTraceAndPersistence:
    def test_every_commit_appends_trace_record(self, client):
        sid = make_session(client)
        add_block_via_voice(client, sid, "one")
        add_block_via_voice(client, sid, "two", y=300.0)
        client.post(f"/sessions/{sid}/undo")
        trace = client.get(f"/sessions/{sid}/trace").text.strip().splitlines()
        kinds = [json.loads(line)["kind"] for line in trace]
        assert kinds == ["create", "gesture", "gesture", "undo"]
        state = client.get(f"/sessions/{sid}").json()
        assert state["sequence"] == 1  # undo stepped back

    def test_session_file_persisted(self, client, tmp_path):
        sid = make_session(client)
        add_block_via_voice(client, sid, "saved text")
        path = tmp_path / f"{sid}.json"
        assert path.exists()
        doc = json.loads(path.read_text())
        assert doc["format"] == "texterial-session"
        assert any(b["text"] == "saved text" for b in doc["state"]["blocks"].values())
