import itertools
import time

import pytest

from texterial.config import EngineConfig
from texterial.core import GestureEvent, GestureKind
from texterial.gateway import MockProvider
from texterial.session import Session

_ids = itertools.count(1)


def pytest_configure(config):
    config._suite_started = time.monotonic()


def pytest_sessionfinish(session, exitstatus):
    # acceptance: the primary suite must finish offline inside a minute
    elapsed = time.monotonic() - session.config._suite_started
    reporter = session.config.pluginmanager.get_plugin("terminalreporter")
    verdict = "PASS" if elapsed < 60.0 else "FAIL"
    if reporter is not None:
        reporter.write_line(f"ACCEPTANCE suite-under-60s: {verdict} ({elapsed:.1f}s)")
    if verdict == "FAIL" and session.exitstatus == 0:
        session.exitstatus = 1


@pytest.fixture
def cfg():
    return EngineConfig()


@pytest.fixture
def provider():
    return MockProvider()


@pytest.fixture
def session():
    return Session(f"test-session-{next(_ids)}")


def press(block_id, x, y, hold_ms=400, spread=20.0):
    """Scripted squeeze press: three points around a center, held."""
    return GestureEvent(
        kind=GestureKind.PRESS,
        points=((x - spread, y, 0.0), (x + spread, y, hold_ms / 2), (x, y, hold_ms)),
        target=block_id,
    )


def pinch(block_id, cx, cy, initial=60.0, final=30.0):
    h0 = initial / 2
    h1 = final / 2
    return GestureEvent(
        kind=GestureKind.PINCH,
        points=((cx - h0, cy, 0.0), (cx + h0, cy, 0.0), (cx - h1, cy, 200.0), (cx + h1, cy, 200.0)),
        target=block_id,
    )


def two_finger(kind, block_id, p1, p2, final_scale, skew=6.0):
    # fingers land slightly above/below the bracketed span, as on a device
    p1 = (p1[0], p1[1] - skew)
    p2 = (p2[0], p2[1] + skew)
    cx = (p1[0] + p2[0]) / 2
    cy = (p1[1] + p2[1]) / 2
    q1 = (cx + (p1[0] - cx) * final_scale, cy + (p1[1] - cy) * final_scale)
    q2 = (cx + (p2[0] - cx) * final_scale, cy + (p2[1] - cy) * final_scale)
    return GestureEvent(
        kind=kind,
        points=((p1[0], p1[1], 0.0), (p2[0], p2[1], 0.0), (q1[0], q1[1], 300.0), (q2[0], q2[1], 300.0)),
        target=block_id,
    )


def smudge(block_id, pts):
    return GestureEvent(
        kind=GestureKind.SMUDGE,
        points=tuple((x, y, float(i * 16)) for i, (x, y) in enumerate(pts)),
        target=block_id,
    )


def drag(block_id, start, delta):
    return GestureEvent(
        kind=GestureKind.DRAG_BLOCK,
        points=((start[0], start[1], 0.0), (start[0] + delta[0], start[1] + delta[1], 250.0)),
        target=block_id,
    )


def rip(block_id, pts):
    return GestureEvent(
        kind=GestureKind.RIP,
        points=tuple((x, y, float(i * 10)) for i, (x, y) in enumerate(pts)),
        target=block_id,
    )


def voice(text, x=40.0, y=40.0):
    return GestureEvent(
        kind=GestureKind.VOICE_UTTERANCE,
        points=((x, y, 0.0),),
        payload=text,
    )


def plant_press(text, x, y):
    return GestureEvent(kind=GestureKind.PLANT_PRESS, points=((x, y, 600.0),), payload=text)


def water_line(pts):
    return GestureEvent(
        kind=GestureKind.WATER_LINE,
        points=tuple((x, y, float(i * 8)) for i, (x, y) in enumerate(pts)),
    )


def drop_leaf(leaf_id, x, y, group=None):
    import json
    payload = json.dumps({"leaves": group}) if group else None
    return GestureEvent(
        kind=GestureKind.DROP_LEAF,
        points=((x, y, 100.0),),
        target=leaf_id,
        payload=payload,
    )
