"""Session state, decision events, and the pure fold that ties them together.

Events are self-contained: the payload of every state-changing event holds
the complete data it introduces (option lists, candidate lists, placements),
so replaying a log needs no provider, no matrix, and no corpus.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

from ..errors import SchemaError
from ..recommend.candidates import Suggestion

STATES = ("created", "anchor_set", "pair_set", "candidates_ready", "completed")

EVENT_KINDS = (
    "create",
    "set_anchor",
    "choose_pair",
    "receive_candidates",
    "accept",
    "reject",
    "reprompt",
    "place",
    "complete",
)


def state_index(state: str) -> int:
    return STATES.index(state)


@dataclass(frozen=True)
class Placement:
    asset_id: str
    x: float
    z: float
    rotation_y: float = 0.0
    scale_override: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.asset_id:
            raise SchemaError("placement asset_id must be nonempty")
        for name, value in (("x", self.x), ("z", self.z)):
            if not 0.0 <= value <= 1.0:
                raise SchemaError(f"placement {name} must lie in [0, 1], got {value}")
        if self.scale_override is not None and self.scale_override <= 0:
            raise SchemaError("scale_override must be positive when present")

    def to_dict(self) -> dict:
        return {
            "asset_id": self.asset_id,
            "x": self.x,
            "z": self.z,
            "rotation_y": self.rotation_y,
            "scale_override": self.scale_override,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Placement":
        return cls(
            asset_id=data["asset_id"],
            x=float(data["x"]),
            z=float(data["z"]),
            rotation_y=float(data.get("rotation_y", 0.0)),
            scale_override=(
                float(data["scale_override"])
                if data.get("scale_override") is not None
                else None
            ),
        )


@dataclass(frozen=True)
class DecisionEvent:
    seq: int
    kind: str
    payload: dict
    at: str

    def __post_init__(self) -> None:
        if self.kind not in EVENT_KINDS:
            raise SchemaError(f"unknown event kind: {self.kind!r}")
        if self.seq < 1:
            raise SchemaError("event seq starts at 1")

    def to_dict(self) -> dict:
        return {"seq": self.seq, "kind": self.kind, "payload": self.payload, "at": self.at}

    @classmethod
    def from_dict(cls, data: dict) -> "DecisionEvent":
        return cls(
            seq=int(data["seq"]),
            kind=data["kind"],
            payload=data["payload"],
            at=data["at"],
        )


@dataclass(frozen=True)
class Session:
    session_id: str
    scene_id: str
    state: str = "created"
    anchor: Optional[str] = None
    co_object: Optional[str] = None
    statistical_options: Tuple[Suggestion, ...] = ()
    semantic_candidates: Tuple[Suggestion, ...] = ()
    placements: Tuple[Placement, ...] = ()
    decision_log: Tuple[DecisionEvent, ...] = ()
    created_at: str = ""
    updated_at: str = ""

    def __post_init__(self) -> None:
        if self.state not in STATES:
            raise SchemaError(f"unknown session state: {self.state!r}")
        rank = state_index(self.state)
        if (self.anchor is not None) != (rank >= state_index("anchor_set")):
            raise SchemaError("anchor must be set exactly from anchor_set onward")
        if (self.co_object is not None) != (rank >= state_index("pair_set")):
            raise SchemaError("co_object must be set exactly from pair_set onward")
        seqs = [e.seq for e in self.decision_log]
        if any(b <= a for a, b in zip(seqs, seqs[1:])):
            raise SchemaError("decision_log seq must be strictly increasing")

    @property
    def next_seq(self) -> int:
        return self.decision_log[-1].seq + 1 if self.decision_log else 1

    def candidate_at(self, rank: int) -> Optional[Suggestion]:
        for s in self.semantic_candidates:
            if s.rank == rank:
                return s
        return None

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "scene_id": self.scene_id,
            "state": self.state,
            "anchor": self.anchor,
            "co_object": self.co_object,
            "statistical_options": [s.to_dict() for s in self.statistical_options],
            "semantic_candidates": [s.to_dict() for s in self.semantic_candidates],
            "placements": [p.to_dict() for p in self.placements],
            "decision_log": [e.to_dict() for e in self.decision_log],
            "created_at": self.created_at,
            "updated_at": self.updated_at,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Session":
        return cls(
            session_id=data["session_id"],
            scene_id=data["scene_id"],
            state=data["state"],
            anchor=data.get("anchor"),
            co_object=data.get("co_object"),
            statistical_options=tuple(
                Suggestion.from_dict(d) for d in data.get("statistical_options", [])
            ),
            semantic_candidates=tuple(
                Suggestion.from_dict(d) for d in data.get("semantic_candidates", [])
            ),
            placements=tuple(Placement.from_dict(d) for d in data.get("placements", [])),
            decision_log=tuple(
                DecisionEvent.from_dict(d) for d in data.get("decision_log", [])
            ),
            created_at=data.get("created_at", ""),
            updated_at=data.get("updated_at", ""),
        )


def _decide_candidate(session: Session, rank: int, status: str) -> Tuple[Suggestion, ...]:
    out: List[Suggestion] = []
    hit = False
    for s in session.semantic_candidates:
        if s.rank == rank:
            out.append(replace(s, status=status))
            hit = True
        else:
            out.append(s)
    if not hit:
        raise SchemaError(f"no candidate at rank {rank} to decide")
    return tuple(out)


def apply_event(session: Optional[Session], event: DecisionEvent) -> Session:
    """Pure fold step: previous snapshot + one event -> next snapshot.

    Every operation in the engine goes through this same function, which
    is what makes replay(decision_log) provably equal to the stored state.
    """
    if session is None:
        if event.kind != "create":
            raise SchemaError(f"first event must be create, got {event.kind!r}")
        return Session(
            session_id=event.payload["session_id"],
            scene_id=event.payload["scene_id"],
            state="created",
            decision_log=(event,),
            created_at=event.at,
            updated_at=event.at,
        )

    if event.seq != session.next_seq:
        raise SchemaError(
            f"event seq {event.seq} does not extend log at {session.next_seq - 1}"
        )

    log = session.decision_log + (event,)
    base = dict(decision_log=log, updated_at=event.at)
    kind = event.kind
    p = event.payload

    if kind == "create":
        raise SchemaError("create is only valid as the first event")
    if kind == "set_anchor":
        return replace(
            session,
            state="anchor_set",
            anchor=p["anchor"],
            statistical_options=tuple(
                Suggestion.from_dict(d) for d in p["statistical_options"]
            ),
            **base,
        )
    if kind == "choose_pair":
        return replace(session, state="pair_set", co_object=p["co_object"], **base)
    if kind in ("receive_candidates", "reprompt"):
        return replace(
            session,
            state="candidates_ready",
            semantic_candidates=tuple(
                Suggestion.from_dict(d) for d in p["candidates"]
            ),
            **base,
        )
    if kind == "accept":
        return replace(
            session,
            semantic_candidates=_decide_candidate(session, p["rank"], "accepted"),
            **base,
        )
    if kind == "reject":
        return replace(
            session,
            semantic_candidates=_decide_candidate(session, p["rank"], "rejected"),
            **base,
        )
    if kind == "place":
        placement = Placement.from_dict(p["placement"])
        # Upsert keyed by asset_id; an existing placement keeps its slot.
        if any(q.asset_id == placement.asset_id for q in session.placements):
            updated = tuple(
                placement if q.asset_id == placement.asset_id else q
                for q in session.placements
            )
        else:
            updated = session.placements + (placement,)
        return replace(session, placements=updated, **base)
    if kind == "complete":
        return replace(session, state="completed", **base)
    raise SchemaError(f"unhandled event kind: {kind!r}")


def replay(events: Sequence[DecisionEvent]) -> Session:
    """Fold a full event log into the session it describes."""
    if not events:
        raise SchemaError("cannot replay an empty event log")
    session: Optional[Session] = None
    for event in events:
        session = apply_event(session, event)
    assert session is not None
    return session
