"""Session-oriented workflow service.

The session is an event-sourced state machine. Every operation validates
against the current snapshot, emits one event carrying the full payload
of what changed, and derives the next snapshot with the same pure fold
that replay uses, so the stored state and the replayed state can never
drift apart.
"""

from .engine import Engine, export_document, import_session
from .jobs import JobRunner, JobTable
from .session import (
    STATES,
    DecisionEvent,
    Placement,
    Session,
    apply_event,
    replay,
)
from .store import SessionStore

__all__ = [
    "Engine",
    "export_document",
    "import_session",
    "JobRunner",
    "JobTable",
    "STATES",
    "DecisionEvent",
    "Placement",
    "Session",
    "apply_event",
    "replay",
    "SessionStore",
]
