"""HTTP JSON service the participant UI drives.

Endpoints per session: GET next trial payload, POST response, GET status,
POST timing telemetry. Errors come back as JSON with a module-qualified
machine-readable code: unknown sessions are 404, everything else a client
can fix is 400. Sessions are isolated; a per-session lock serializes all
mutating work on one session while distinct sessions proceed concurrently.
"""

from __future__ import annotations

import threading
from typing import Mapping, Optional

from fastapi import Body, FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from ..errors import LexiplexError, UnknownSession, error_code
from .config import record_from_json_dict
from .store import EventStore, persist_response, replay_sessions


def _error_response(exc: LexiplexError, status: int) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"error": error_code(exc), "detail": str(exc)},
    )


def create_app(store: EventStore, configs: Mapping, ui_dir=None) -> FastAPI:
    """Build the service over an event store and per-session configs.

    Existing log contents are replayed first, so restarting the server on a
    partially collected study resumes every session mid-stream.
    """
    app = FastAPI(title="translation-experiment service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    runners = replay_sessions(store, configs)
    locks: dict = {sid: threading.Lock() for sid in runners}

    @app.exception_handler(LexiplexError)
    def on_domain_error(_request, exc: LexiplexError):
        status = 404 if isinstance(exc, UnknownSession) else 400
        return _error_response(exc, status)

    def get_runner(session_id: str):
        runner = runners.get(session_id)
        if runner is None:
            raise UnknownSession(f"unknown session {session_id!r}")
        return runner

    @app.get("/session/{session_id}/next")
    def next_trial(session_id: str) -> dict:
        runner = get_runner(session_id)
        with locks[session_id]:
            payload = runner.next_payload()
            if payload is None:
                return {"state": "done"}
            return {"state": runner.state, **payload}

    @app.post("/session/{session_id}/response")
    def post_response(session_id: str, body: dict = Body(...)) -> dict:
        runner = get_runner(session_id)
        record = record_from_json_dict(body)
        with locks[session_id]:
            # the runner rejects records addressed to a different session
            position = persist_response(store, runner, record)
            flags = runner.timing_flags(record)
        return {"position": position, "timing_flags": flags}

    @app.get("/session/{session_id}/status")
    def status(session_id: str) -> dict:
        runner = get_runner(session_id)
        with locks[session_id]:
            return {
                "state": runner.state,
                "completed": runner.completed,
                "remaining": runner.remaining,
            }

    @app.post("/session/{session_id}/event")
    def telemetry(session_id: str, body: dict = Body(...)) -> dict:
        get_runner(session_id)
        with locks[session_id]:
            position = store.append(
                {"type": "telemetry", "session": session_id, "payload": body}
            )
        return {"position": position}

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
