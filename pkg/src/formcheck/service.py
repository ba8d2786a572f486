"""Streaming analysis service: keypoint frames in, diagnoses out.

One bidirectional websocket connection per client session carries JSON
text messages; HTTP endpoints expose health, database stats, and online
exemplar addition.  The exemplar database is immutable: additions build
a new snapshot and atomically swap it in, so in-flight frames always
classify against exactly one snapshot.

Wire messages (client -> server):
    {"type": "frame", "t": int, "w": int, "h": int, "kp": [[x,y,c] x 17]}
    {"type": "config", "ea_ratio"?: float, "params"?: {...},
     "min_interval_ms"?: int}
Server -> client:
    {"type": "diagnosis", ...diagnosis fields..., "match": {...}, "t": int}
    {"type": "error", "error": code, "detail": str}
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field, fields

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse

from . import filling, matching, rules
from .errors import (BadFrame, DuplicateSource, FormcheckError,
                     UnfillableFrame)
from .matching import PoseDatabase
from .model import PoseFrame, PoseLabel
from .rules import RuleParams

ENV_DB = "FDR_DB"


def resolve_db_path(flag_value: str | None) -> str | None:
    """Database path with the FDR_DB environment variable taking
    precedence over the command-line flag."""
    return os.environ.get(ENV_DB) or flag_value


class DatabaseHolder:
    """Publishes immutable database snapshots.  Readers grab the current
    snapshot without locking; writers serialize through a lock and swap
    in a fresh snapshot with a bumped version tag."""

    def __init__(self, db: PoseDatabase):
        self._db = db
        self._version = 1
        self._write_lock = threading.Lock()

    def snapshot(self) -> tuple[PoseDatabase, int]:
        # single attribute reads are atomic; grab both under the lock's
        # memory fence only on the writer side
        return self._db, self._version

    def add_exemplar(self, frame: PoseFrame, label: PoseLabel,
                     source_id: str) -> int:
        """Build and publish a snapshot with one more exemplar; returns
        the new size.  Raises DuplicateSource or feature errors."""
        filled, _ = filling.fill_missing(frame)
        exemplar = matching.make_exemplar(filled, label, source_id)
        with self._write_lock:
            new_db = self._db.with_exemplar(exemplar)
            self._db = new_db
            self._version += 1
            return len(new_db)


@dataclass
class SessionState:
    """Per-connection state; frames within a session process sequentially."""

    session_id: str
    frames_processed: int = 0
    last_label: PoseLabel | None = None
    params: RuleParams = field(default_factory=RuleParams)
    ea_ratio: float | None = None  # None = database default
    min_interval_ms: int = 0
    last_emit_ms: int | None = None


def new_session() -> SessionState:
    return SessionState(session_id=uuid.uuid4().hex)


_PARAM_FIELDS = {f.name for f in fields(RuleParams)}


def apply_config(session: SessionState, msg: dict) -> None:
    """Update per-session knobs from a config message; unknown params or
    bad values raise BadFrame."""
    if "ea_ratio" in msg:
        ratio = float(msg["ea_ratio"])
        if ratio <= 0:
            raise BadFrame(f"ea_ratio must be > 0, got {ratio}")
        session.ea_ratio = ratio
    if "params" in msg:
        overrides = msg["params"]
        if not isinstance(overrides, dict):
            raise BadFrame("params must be an object")
        unknown = set(overrides) - _PARAM_FIELDS
        if unknown:
            raise BadFrame(f"unknown rule params: {sorted(unknown)}")
        merged = {f.name: getattr(session.params, f.name)
                  for f in fields(RuleParams)}
        merged.update({k: float(v) for k, v in overrides.items()})
        try:
            session.params = RuleParams(**merged)
        except ValueError as exc:
            raise BadFrame(str(exc)) from None
    if "min_interval_ms" in msg:
        interval = int(msg["min_interval_ms"])
        if interval < 0:
            raise BadFrame("min_interval_ms must be >= 0")
        session.min_interval_ms = interval


def process_frame(session: SessionState, msg: dict,
                  holder: DatabaseHolder) -> dict | None:
    """Run the full pipeline (fill -> classify -> diagnose) for one frame
    message against one database snapshot.

    Returns the diagnosis message, or None when the session's advice
    throttle coalesces this frame.  Raises BadFrame / UnfillableFrame for
    the caller to convert into an error message.
    """
    frame = PoseFrame.from_json_obj(msg)
    filled, _ = filling.fill_missing(frame)
    db, version = holder.snapshot()
    match = matching.classify(filled, db, session.ea_ratio)
    diagnosis = rules.diagnose(filled, match, session.params)

    session.frames_processed += 1
    session.last_label = match.label

    if session.min_interval_ms > 0 and session.last_emit_ms is not None:
        if frame.timestamp_ms - session.last_emit_ms < session.min_interval_ms:
            return None
    session.last_emit_ms = frame.timestamp_ms

    out = {"type": "diagnosis"}
    out.update(diagnosis.to_json_obj())
    out["match"] = {"label": match.label.value,
                    "distance": match.distance,
                    "src": match.best_source_id}
    out["t"] = frame.timestamp_ms
    out["db_version"] = version
    return out


def _error_msg(code: str, detail: str) -> dict:
    return {"type": "error", "error": code, "detail": detail}


def build_app(db: PoseDatabase) -> FastAPI:
    app = FastAPI(title="formcheck")
    holder = DatabaseHolder(db)
    app.state.holder = holder

    @app.get("/health")
    def health():
        snapshot, _ = holder.snapshot()
        return {"status": "ok", "db_size": len(snapshot)}

    @app.get("/db/stats")
    def db_stats():
        snapshot, version = holder.snapshot()
        return {"size": len(snapshot), "labels": snapshot.label_counts(),
                "version": version, "ea_ratio": snapshot.ea_ratio}

    @app.post("/db/exemplar")
    def add_exemplar(body: dict):
        try:
            frame = PoseFrame.from_json_obj(body.get("frame"))
            label = PoseLabel.parse(str(body.get("label")))
            source_id = str(body.get("source_id") or "")
            if not source_id:
                raise BadFrame("source_id is required")
            size = holder.add_exemplar(frame, label, source_id)
        except DuplicateSource as exc:
            return JSONResponse({"error": "duplicate_source",
                                 "detail": str(exc)}, status_code=409)
        except FormcheckError as exc:
            return JSONResponse({"error": "bad_request", "detail": str(exc)},
                                status_code=400)
        return {"ok": True, "db_size": size}

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        session = new_session()
        while True:
            try:
                text = await ws.receive_text()
            except WebSocketDisconnect:
                break
            try:
                msg = json.loads(text)
            except json.JSONDecodeError as exc:
                await ws.send_json(_error_msg("bad_frame", str(exc)))
                continue
            if not isinstance(msg, dict):
                await ws.send_json(_error_msg("bad_frame",
                                              "message must be an object"))
                continue
            kind = msg.get("type")
            try:
                if kind == "frame":
                    reply = process_frame(session, msg, holder)
                    if reply is not None:
                        await ws.send_json(reply)
                elif kind == "config":
                    apply_config(session, msg)
                else:
                    await ws.send_json(
                        _error_msg("bad_frame", f"unknown type: {kind!r}"))
            except UnfillableFrame as exc:
                await ws.send_json(_error_msg("unfillable", str(exc)))
            except BadFrame as exc:
                await ws.send_json(_error_msg("bad_frame", str(exc)))
            except FormcheckError as exc:
                await ws.send_json(_error_msg("internal", str(exc)))

    return app


def serve(db_path: str, port: int = 8000,
          ea_ratio: float | None = None) -> None:
    """Load the database and run the service (blocking)."""
    import uvicorn

    db = PoseDatabase.load(db_path)
    if ea_ratio is not None:
        db = PoseDatabase(list(db.exemplars), ea_ratio)
    uvicorn.run(build_app(db), host="127.0.0.1", port=port, log_level="warning")
