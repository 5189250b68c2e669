"""Session store for the HTTP service: per-document locking, persistence
and the change feed.

One logical writer per session (an asyncio lock); sessions are fully
concurrent with each other. Every mutation persists the session with
write-temp-then-rename and pushes exactly one event to the feed. Slow feed
subscribers are dropped with a resync marker instead of blocking the writer.
"""

from __future__ import annotations

import asyncio
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from ..backends import CompletionBackend
from ..document import MockDocument, document_from_json, document_to_json
from ..errors import SchemaError
from ..prompts import prompt_from_json, prompt_to_json
from ..session import Session

EVENT_QUEUE_SIZE = 64
EVENT_LOG_SIZE = 256


@dataclass
class Subscriber:
    queue: asyncio.Queue
    dropped: bool = False


@dataclass
class StoredSession:
    session: Session
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)
    subscribers: list[Subscriber] = field(default_factory=list)
    event_log: list[dict] = field(default_factory=list)


class SessionStore:
    def __init__(
        self,
        backend: CompletionBackend | None = None,
        state_dir: str | Path | None = None,
        history_cap: int = 200,
    ):
        self.backend = backend
        self.state_dir = Path(state_dir) if state_dir else None
        self.history_cap = history_cap
        self.sessions: dict[str, StoredSession] = {}
        if self.state_dir:
            self.state_dir.mkdir(parents=True, exist_ok=True)
            self._load_all()

    # -- lifecycle ------------------------------------------------------------

    def create(self, doc: MockDocument) -> StoredSession:
        stored = StoredSession(
            session=Session(doc, backend=self.backend, history_cap=self.history_cap)
        )
        self.sessions[doc.doc_id] = stored
        self.persist(stored)
        return stored

    def get(self, doc_id: str) -> StoredSession | None:
        return self.sessions.get(doc_id)

    # -- persistence ----------------------------------------------------------

    def _path_for(self, doc_id: str) -> Path:
        safe = "".join(c if c.isalnum() or c in "-_." else "_" for c in doc_id)
        return self.state_dir / f"{safe}.json"

    def persist(self, stored: StoredSession) -> None:
        if not self.state_dir:
            return
        session = stored.session
        payload = {
            "document": document_to_json(session.doc),
            "prompts": [prompt_to_json(p) for p in session.prompts],
            "revision": session.doc.revision,
        }
        path = self._path_for(session.doc.doc_id)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(
            json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
        os.replace(tmp, path)

    def _load_all(self) -> None:
        for path in sorted(self.state_dir.glob("*.json")):
            try:
                payload = json.loads(path.read_text(encoding="utf-8"))
                doc = document_from_json(payload["document"])
                doc.revision = int(payload.get("revision", 0))
                prompts = [prompt_from_json(p) for p in payload.get("prompts", [])]
            except (KeyError, ValueError, SchemaError) as exc:
                raise SchemaError(f"corrupt session file {path}: {exc}") from exc
            session = Session(
                doc, prompts=prompts, backend=self.backend, history_cap=self.history_cap
            )
            self.sessions[doc.doc_id] = StoredSession(session=session)

    # -- change feed ----------------------------------------------------------

    def subscribe(self, stored: StoredSession) -> Subscriber:
        subscriber = Subscriber(queue=asyncio.Queue(maxsize=EVENT_QUEUE_SIZE))
        stored.subscribers.append(subscriber)
        return subscriber

    def unsubscribe(self, stored: StoredSession, subscriber: Subscriber) -> None:
        if subscriber in stored.subscribers:
            stored.subscribers.remove(subscriber)

    def publish(self, stored: StoredSession, event: str, payload: dict | None = None) -> None:
        message = {
            "event": event,
            "revision": stored.session.doc.revision,
            **(payload or {}),
        }
        stored.event_log.append(message)
        if len(stored.event_log) > EVENT_LOG_SIZE:
            del stored.event_log[: len(stored.event_log) - EVENT_LOG_SIZE]
        for subscriber in stored.subscribers:
            if subscriber.dropped:
                continue
            try:
                subscriber.queue.put_nowait(message)
            except asyncio.QueueFull:
                subscriber.dropped = True
