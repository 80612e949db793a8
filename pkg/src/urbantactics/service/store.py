"""Session storage with per-session mutual exclusion.

Snapshots live in memory; with a persist directory each save also writes
`<session_id>.json` atomically (write-to-temp, rename) so a restart can
pick sessions back up. One writer per session is enforced by a lock that
callers hold across read-modify-write.
"""

from __future__ import annotations

import json
import os
import threading
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, Iterator, List, Optional

from ..errors import UnknownSession
from .session import Session


class SessionStore:
    def __init__(self, persist_dir: Optional[Path | str] = None) -> None:
        self._sessions: Dict[str, Session] = {}
        self._locks: Dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self.persist_dir = Path(persist_dir) if persist_dir is not None else None
        if self.persist_dir is not None:
            self.persist_dir.mkdir(parents=True, exist_ok=True)
            self._load_existing()

    def _load_existing(self) -> None:
        assert self.persist_dir is not None
        for path in sorted(self.persist_dir.glob("*.json")):
            data = json.loads(path.read_text(encoding="utf-8"))
            session = Session.from_dict(data)
            self._sessions[session.session_id] = session

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            lock = self._locks.get(session_id)
            if lock is None:
                lock = threading.Lock()
                self._locks[session_id] = lock
            return lock

    @contextmanager
    def exclusive(self, session_id: str) -> Iterator[None]:
        """Hold the per-session writer lock for a read-modify-write."""
        lock = self._lock_for(session_id)
        with lock:
            yield

    def allocate_id(self) -> str:
        """Next sequential session id, unique against everything stored."""
        with self._registry_lock:
            n = len(self._sessions) + 1
            while f"s-{n:04d}" in self._sessions:
                n += 1
            return f"s-{n:04d}"

    def get(self, session_id: str) -> Session:
        with self._registry_lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSession(f"no session with id {session_id!r}")
        return session

    def exists(self, session_id: str) -> bool:
        with self._registry_lock:
            return session_id in self._sessions

    def list_ids(self) -> List[str]:
        with self._registry_lock:
            return sorted(self._sessions)

    def save(self, session: Session) -> None:
        with self._registry_lock:
            self._sessions[session.session_id] = session
        if self.persist_dir is not None:
            final = self.persist_dir / f"{session.session_id}.json"
            tmp = final.with_suffix(".json.tmp")
            tmp.write_text(
                json.dumps(session.to_dict(), indent=2, sort_keys=True) + "\n",
                encoding="utf-8",
            )
            os.replace(tmp, final)
