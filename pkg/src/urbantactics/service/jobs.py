"""Mesh-generation jobs: a bounded worker pool plus a status table.

Jobs are side effects outside the event-sourced session state; the table
records queued/running/done/failed per job so the API can answer polls
and `place_asset` can check readiness. A synchronous mode runs each job
inline on submit, which is what the CLI and most tests use.
"""

from __future__ import annotations

import threading
import traceback
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional

JOB_STATES = ("queued", "running", "done", "failed")


@dataclass(frozen=True)
class JobRecord:
    job_id: str
    session_id: str
    rank: int
    object_name: str
    status: str = "queued"
    asset_id: Optional[str] = None
    error: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "session_id": self.session_id,
            "rank": self.rank,
            "object_name": self.object_name,
            "status": self.status,
            "asset_id": self.asset_id,
            "error": self.error,
        }


class JobTable:
    def __init__(self) -> None:
        self._records: Dict[str, JobRecord] = {}
        self._lock = threading.Lock()

    def put(self, record: JobRecord) -> None:
        with self._lock:
            self._records[record.job_id] = record

    def update(self, job_id: str, **changes) -> JobRecord:
        with self._lock:
            record = replace(self._records[job_id], **changes)
            self._records[job_id] = record
            return record

    def get(self, job_id: str) -> Optional[JobRecord]:
        with self._lock:
            return self._records.get(job_id)

    def for_session(self, session_id: str) -> List[JobRecord]:
        with self._lock:
            found = [r for r in self._records.values() if r.session_id == session_id]
        return sorted(found, key=lambda r: r.job_id)

    def by_asset(self, asset_id: str) -> Optional[JobRecord]:
        with self._lock:
            for record in self._records.values():
                if record.asset_id == asset_id and record.status == "done":
                    return record
        return None


class JobRunner:
    """Run job callables either inline or on a bounded thread pool."""

    def __init__(self, table: JobTable, parallelism: int = 2, synchronous: bool = False) -> None:
        self.table = table
        self.synchronous = synchronous
        self._pool: Optional[ThreadPoolExecutor] = None
        if not synchronous:
            self._pool = ThreadPoolExecutor(max_workers=max(1, parallelism))
        self._pending: List[Future] = []

    def submit(self, record: JobRecord, work: Callable[[], str]) -> JobRecord:
        """Register the job and run `work`; work returns the asset_id."""
        self.table.put(record)

        def _run() -> None:
            self.table.update(record.job_id, status="running")
            try:
                asset_id = work()
            except Exception as exc:  # noqa: BLE001 - job isolation boundary
                self.table.update(
                    record.job_id,
                    status="failed",
                    error=f"{type(exc).__name__}: {exc}",
                )
            else:
                self.table.update(record.job_id, status="done", asset_id=asset_id)

        if self.synchronous or self._pool is None:
            _run()
        else:
            self._pending.append(self._pool.submit(_run))
        return self.table.get(record.job_id)  # type: ignore[return-value]

    def drain(self) -> None:
        """Wait for everything in flight (tests and shutdown)."""
        for future in self._pending:
            future.result()
        self._pending.clear()

    def close(self) -> None:
        self.drain()
        if self._pool is not None:
            self._pool.shutdown(wait=True)
