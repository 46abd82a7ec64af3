"""Session files: canonical JSON with an embedded digest, written atomically."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .core import canonical_hash, canonical_json
from .errors import CorruptFile
from .session import Session

FORMAT = "texterial-session"
VERSION = 1


def persist_session(session: Session, path: str | Path) -> Path:
    """Write the canonical session file via temp-file-and-rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    state = session.state_dict()
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "session_id": session.session_id,
        "digest": canonical_hash(state),
        "state": state,
    }
    payload = canonical_json(doc).encode("utf-8")
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def load_session(path: str | Path) -> Session:
    """Read a session file back, verifying its embedded digest."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CorruptFile(f"{path} is not a valid session file: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise CorruptFile(f"{path} is not a {FORMAT} file")
    state = doc.get("state")
    if state is None or canonical_hash(state) != doc.get("digest"):
        raise CorruptFile(f"{path}: digest does not match state")
    session = Session(doc.get("session_id", "restored"))
    session.restore_state(state)
    session.snapshots.clear()
    session.trace.clear()
    snap = session.commit("session_loaded")
    session.trace.append({
        "t": session.clock_ms,
        "kind": "create",
        "writing_context": session.writing_context,
        "expected_hash": snap.hash,
    })
    return session
