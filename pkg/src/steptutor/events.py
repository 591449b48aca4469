"""Append-only session event log backed by one JSONL file per session.

Every interaction the service handles becomes one event line; nothing is
ever rewritten or deleted. A fresh store pointed at the same directory
rebuilds identical state by replaying the files, and exports are
byte-stable across that round trip.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

__all__ = ["EVENT_KINDS", "SessionEvent", "EventStore", "EventLogError"]

EVENT_KINDS = (
    "session_started",
    "snapshot_logged",
    "hint_issued",
    "hint_rated",
    "solution_checked",
)


class EventLogError(Exception):
    pass


@dataclass(frozen=True)
class SessionEvent:
    kind: str
    session_id: str
    at: int  # milliseconds since epoch
    payload: dict

    def to_line(self) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "session_id": self.session_id,
                "at": self.at,
                "payload": self.payload,
            },
            sort_keys=True,
            separators=(",", ":"),
        )

    @classmethod
    def from_line(cls, line: str) -> "SessionEvent":
        data = json.loads(line)
        kind = data["kind"]
        if kind not in EVENT_KINDS:
            raise EventLogError(f"unknown event kind {kind!r}")
        return cls(
            kind=kind,
            session_id=data["session_id"],
            at=int(data["at"]),
            payload=data["payload"],
        )


class EventStore:
    """Per-session append-only logs under a data directory.

    Appends within one session are serialized and strictly time-ordered
    (timestamps are bumped when the clock does not advance). The all-sessions
    export concatenates per-session logs in session creation order.
    """

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._events: dict[str, list[SessionEvent]] = {}
        self._session_order: list[str] = []
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self._load()

    def _load(self) -> None:
        loaded: list[tuple[int, str, list[SessionEvent]]] = []
        for path in self.data_dir.glob("*.jsonl"):
            events = [
                SessionEvent.from_line(line)
                for line in path.read_text(encoding="utf-8").splitlines()
                if line.strip()
            ]
            if events:
                loaded.append((events[0].at, events[0].session_id, events))
        for _, session_id, events in sorted(loaded, key=lambda item: (item[0], item[1])):
            self._events[session_id] = events
            self._session_order.append(session_id)
            self._locks[session_id] = threading.Lock()

    def _session_lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            if session_id not in self._locks:
                self._locks[session_id] = threading.Lock()
                self._session_order.append(session_id)
                self._events[session_id] = []
            return self._locks[session_id]

    def _path(self, session_id: str) -> Path:
        return self.data_dir / f"{session_id}.jsonl"

    def append(self, kind: str, session_id: str, payload: dict) -> SessionEvent:
        if kind not in EVENT_KINDS:
            raise EventLogError(f"unknown event kind {kind!r}")
        lock = self._session_lock(session_id)
        with lock:
            now = int(time.time() * 1000)
            history = self._events[session_id]
            if history and now <= history[-1].at:
                now = history[-1].at + 1
            event = SessionEvent(kind=kind, session_id=session_id, at=now, payload=payload)
            with self._path(session_id).open("a", encoding="utf-8") as fh:
                fh.write(event.to_line() + "\n")
            history.append(event)
            return event

    def session_ids(self) -> list[str]:
        return list(self._session_order)

    def events(self, session_id: str) -> list[SessionEvent]:
        if session_id not in self._events:
            raise KeyError(session_id)
        return list(self._events[session_id])

    def has_session(self, session_id: str) -> bool:
        return session_id in self._events

    def export_lines(self, session_id: str | None = None) -> Iterator[str]:
        """Event lines in append order; all sessions when session_id is None."""
        if session_id is None:
            ids = self._session_order
        else:
            if session_id not in self._events:
                raise KeyError(session_id)
            ids = [session_id]
        for sid in ids:
            for event in self._events[sid]:
                yield event.to_line()
