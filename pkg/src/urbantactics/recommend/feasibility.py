"""Context-tag feasibility screening for proposed objects.

A rule matches by substring on the candidate's name. A matched rule passes
when the scene carries at least one of the rule's required tags and none
of its forbidden tags. Filtered candidates stay in the list with a reason;
surviving candidates are re-ranked contiguously.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

from ..config import default_rules_json
from ..errors import SchemaError
from ..ingest import CONTEXT_TAGS, Scene
from .candidates import Suggestion


@dataclass(frozen=True)
class FeasibilityRule:
    pattern: str
    required_tags: Tuple[str, ...] = ()
    forbidden_tags: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.pattern.strip():
            raise SchemaError("feasibility rule pattern must be nonempty")
        object.__setattr__(self, "pattern", self.pattern.strip().lower())
        for tag in (*self.required_tags, *self.forbidden_tags):
            if tag not in CONTEXT_TAGS:
                raise SchemaError(f"unknown context tag in rule {self.pattern!r}: {tag}")
        overlap = set(self.required_tags) & set(self.forbidden_tags)
        if overlap:
            raise SchemaError(
                f"rule {self.pattern!r} lists tags as both required and "
                f"forbidden: {sorted(overlap)}"
            )

    def matches(self, object_name: str) -> bool:
        return self.pattern in object_name.lower()

    def check(self, tags: FrozenSet[str]) -> Optional[str]:
        """None when the scene satisfies the rule, else a short reason."""
        if self.required_tags and not set(self.required_tags) & tags:
            return f"{self.pattern} requires {'|'.join(self.required_tags)}"
        hit = set(self.forbidden_tags) & tags
        if hit:
            return f"{self.pattern} forbids {'|'.join(sorted(hit))}"
        return None


def load_rules(path: Optional[Path] = None) -> List[FeasibilityRule]:
    """Load rules from a JSON file, or the built-in defaults."""
    if path is None:
        data = default_rules_json()
    else:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid feasibility rules JSON: {exc}") from exc
    if not isinstance(data, list):
        raise SchemaError("feasibility rules file must contain a list")
    rules = []
    for entry in data:
        rules.append(
            FeasibilityRule(
                pattern=entry["pattern"],
                required_tags=tuple(entry.get("required_tags", ())),
                forbidden_tags=tuple(entry.get("forbidden_tags", ())),
            )
        )
    return rules


def check_object(name: str, tags: FrozenSet[str], rules: Sequence[FeasibilityRule]) -> Optional[str]:
    """First failing reason across all matching rules, or None."""
    for rule in rules:
        if rule.matches(name):
            reason = rule.check(tags)
            if reason is not None:
                return reason
    return None


def apply_feasibility(
    suggestions: Iterable[Suggestion],
    scene: Scene,
    rules: Sequence[FeasibilityRule],
) -> List[Suggestion]:
    """Screen proposed suggestions against the scene's context tags.

    Suggestions that already carry a decision pass through untouched.
    Survivors get fresh contiguous ranks (1..n) in their original order;
    filtered entries keep the rank they arrived with.
    """
    out: List[Suggestion] = []
    next_rank = 1
    for s in suggestions:
        if s.status != "proposed":
            out.append(s)
            next_rank += 1
            continue
        reason = check_object(s.object_name, scene.context_tags, rules)
        if reason is None:
            out.append(replace(s, rank=next_rank))
            next_rank += 1
        else:
            out.append(replace(s, status="filtered", filter_reason=reason))
    return out
