"""Candidate objects from both branches and the retrying provider loop."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

from ..cooccur import CooccurrenceMatrix, top_k
from ..errors import MalformedResponse, SchemaError, TooFewCandidates
from .csvparse import parse_candidate_csv
from .prompts import PromptBundle
from .providers import VlmProvider, VlmRequest

SEMANTIC_COUNT = 5

_STATUSES = ("proposed", "accepted", "rejected", "filtered")
_PROVENANCES = ("statistical", "semantic")


@dataclass(frozen=True)
class Suggestion:
    """One candidate object, from either branch."""

    object_name: str
    description: str
    provenance: str
    rank: int
    status: str = "proposed"
    filter_reason: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.object_name.strip():
            raise SchemaError("suggestion object_name must be nonempty")
        if self.provenance not in _PROVENANCES:
            raise SchemaError(f"unknown provenance: {self.provenance!r}")
        if self.status not in _STATUSES:
            raise SchemaError(f"unknown status: {self.status!r}")
        if self.rank < 1:
            raise SchemaError(f"rank must be >= 1, got {self.rank}")
        if self.filter_reason is not None and self.status != "filtered":
            raise SchemaError("filter_reason only applies to filtered suggestions")

    def to_dict(self) -> dict:
        return {
            "object_name": self.object_name,
            "description": self.description,
            "provenance": self.provenance,
            "rank": self.rank,
            "status": self.status,
            "filter_reason": self.filter_reason,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Suggestion":
        return cls(
            object_name=data["object_name"],
            description=data.get("description", ""),
            provenance=data["provenance"],
            rank=data["rank"],
            status=data.get("status", "proposed"),
            filter_reason=data.get("filter_reason"),
        )


@dataclass(frozen=True)
class CandidateBatch:
    """The result of one semantic-branch request, retries included."""

    suggestions: Tuple[Suggestion, ...]
    retry_count: int
    raw_response: str

    def to_dict(self) -> dict:
        return {
            "suggestions": [s.to_dict() for s in self.suggestions],
            "retry_count": self.retry_count,
            "raw_response": self.raw_response,
        }


def statistical_candidates(
    matrix: CooccurrenceMatrix,
    anchor: str,
    k: int = 5,
    exclude: Sequence[str] = ("person",),
    mode: str = "conditional",
) -> List[Suggestion]:
    """Wrap the matrix top-k as proposed suggestions with empty descriptions."""
    ranking = top_k(matrix, anchor, k=k, exclude=exclude, mode=mode)
    return [
        Suggestion(
            object_name=name,
            description="",
            provenance="statistical",
            rank=i + 1,
        )
        for i, (name, _score) in enumerate(ranking.entries)
    ]


def _normalize_name(name: str) -> str:
    return " ".join(name.lower().split())


def _rows_to_suggestions(rows: Sequence[Tuple[str, str]], want: int) -> Optional[List[Suggestion]]:
    """Dedupe by normalized name and keep the first `want` usable rows."""
    seen = set()
    out: List[Suggestion] = []
    for name, description in rows:
        key = _normalize_name(name)
        if key in seen or not description.strip():
            continue
        seen.add(key)
        out.append(
            Suggestion(
                object_name=name,
                description=description,
                provenance="semantic",
                rank=len(out) + 1,
            )
        )
        if len(out) == want:
            return out
    return None


def request_semantic_candidates(
    bundle: PromptBundle,
    provider: VlmProvider,
    max_retries: int = 2,
    want: int = SEMANTIC_COUNT,
) -> CandidateBatch:
    """Ask the provider for candidates, retrying on unusable output.

    The first attempt sends the bundle as built; each retry appends the
    strict-format reminder. A response that parses but yields fewer than
    `want` distinct usable rows counts as a failure too. After the retry
    budget the last failure is re-raised (MalformedResponse) or reported
    as TooFewCandidates.
    """
    attempts = max_retries + 1
    current = bundle
    last_error: Optional[Exception] = None
    for attempt in range(attempts):
        if attempt == 1:
            current = bundle.tightened()
        raw = provider.complete(
            VlmRequest(prompt=current.full_text, image_refs=current.image_refs)
        )
        try:
            rows = parse_candidate_csv(raw)
        except MalformedResponse as exc:
            last_error = exc
            continue
        picked = _rows_to_suggestions(rows, want)
        if picked is not None:
            return CandidateBatch(
                suggestions=tuple(picked), retry_count=attempt, raw_response=raw
            )
        last_error = TooFewCandidates(
            f"provider returned {len(rows)} rows, fewer than {want} usable "
            f"candidates after deduplication"
        )
    assert last_error is not None
    raise last_error
