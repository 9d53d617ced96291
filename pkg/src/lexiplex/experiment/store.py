"""Append-only JSON Lines event log.

One event per line; the first line is a schema-version header so old logs
fail loudly instead of being misread. Events are plain dicts with a "type"
key; response events carry the full response record and can be replayed
through fresh session runners to reconstruct live state exactly.
"""

from __future__ import annotations

import json
import os
import threading
from typing import Mapping, Optional

from ..errors import LexiplexError, StoreError
from .config import record_from_json_dict
from .session import SessionRunner

SCHEMA_VERSION = "lexiplex.events.v1"


def _encode(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


class EventStore:
    """Durable, append-only event sequence (in-memory when no path is given)."""

    def __init__(self, path=None):
        self._path = None if path is None else os.fspath(path)
        self._events: list = []
        self._lock = threading.Lock()
        if self._path is None:
            return
        if os.path.exists(self._path) and os.path.getsize(self._path) > 0:
            self._load_existing()
        else:
            try:
                with open(self._path, "w", encoding="utf-8") as fh:
                    fh.write(_encode({"schema": SCHEMA_VERSION}) + "\n")
            except OSError as exc:
                raise StoreError(f"cannot create event log: {exc}") from exc

    def _load_existing(self) -> None:
        try:
            with open(self._path, "r", encoding="utf-8") as fh:
                lines = fh.read().splitlines()
        except OSError as exc:
            raise StoreError(f"cannot read event log: {exc}") from exc
        try:
            header = json.loads(lines[0])
        except json.JSONDecodeError as exc:
            raise StoreError(f"bad event log header: {exc}") from exc
        if not isinstance(header, dict) or header.get("schema") != SCHEMA_VERSION:
            raise StoreError(
                f"event log schema {header!r} is not {SCHEMA_VERSION!r}"
            )
        for i, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            try:
                event = json.loads(line)
            except json.JSONDecodeError as exc:
                raise StoreError(f"bad event at line {i}: {exc}") from exc
            if not isinstance(event, dict):
                raise StoreError(f"event at line {i} is not an object")
            self._events.append(event)

    def append(self, event: Mapping) -> int:
        """Write one event; returns its 0-based position (header excluded)."""
        if not isinstance(event, Mapping):
            raise StoreError("events must be JSON objects")
        payload = dict(event)
        try:
            line = _encode(payload)
        except (TypeError, ValueError) as exc:
            raise StoreError(f"event is not JSON-serializable: {exc}") from exc
        with self._lock:
            if self._path is not None:
                try:
                    with open(self._path, "a", encoding="utf-8") as fh:
                        fh.write(line + "\n")
                        fh.flush()
                except OSError as exc:
                    raise StoreError(f"cannot append to event log: {exc}") from exc
            self._events.append(payload)
            return len(self._events) - 1

    def events(self) -> list:
        with self._lock:
            return [dict(e) for e in self._events]

    def __len__(self) -> int:
        with self._lock:
            return len(self._events)


def persist_response(store: EventStore, runner: SessionRunner, record) -> int:
    """Validate a response through the session runner and append it.

    Returns the store position of the event. The event keeps both the raw
    record and the runner's verdicts (position within session, timing flags)
    so the log alone is enough to rebuild or audit a session.
    """
    position_in_session = runner.submit(record)
    flags = runner.timing_flags(record)
    return store.append(
        {
            "type": "response",
            "session": record.session,
            "position_in_session": position_in_session,
            "timing_flags": flags,
            "record": record.to_json_dict(),
        }
    )


def replay_sessions(store: EventStore, configs: Mapping) -> dict:
    """Rebuild one runner per configured session by re-submitting logged
    responses in order. A log that no longer validates raises StoreError."""
    runners = {sid: SessionRunner(cfg) for sid, cfg in configs.items()}
    for i, event in enumerate(store.events()):
        if event.get("type") != "response":
            continue
        sid = event.get("session")
        if sid not in runners:
            raise StoreError(f"event {i} references unknown session {sid!r}")
        try:
            record = record_from_json_dict(event.get("record"))
            runners[sid].submit(record)
        except LexiplexError as exc:
            raise StoreError(f"event {i} does not replay: {exc}") from exc
    return runners


def transcripts_from(store: EventStore) -> dict:
    """(session, trial) -> transcript text from transcript events (last wins)."""
    out: dict = {}
    for event in store.events():
        if event.get("type") != "transcript":
            continue
        sid, trial, text = event.get("session"), event.get("trial"), event.get("transcript")
        if isinstance(sid, str) and isinstance(trial, str) and isinstance(text, str):
            out[(sid, trial)] = text
    return out
