"""Turn an accepted suggestion into a concise generation brief.

The interesting part is pulling a real-world height out of free prose.
Only dimensions that are explicitly about height count ("3.5 feet tall",
"2 feet high", "approximately 3.5 meters in height"); widths and seat
diameters must not set the scale. Values outside sanity bounds are
ignored in favor of the per-class default table.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Optional

from ..config import default_size_table
from ..errors import MissingDescription, SchemaError
from ..recommend.candidates import Suggestion

MIN_HEIGHT_M = 0.05
MAX_HEIGHT_M = 20.0

_UNIT_TO_M = {
    "feet": 0.3048,
    "foot": 0.3048,
    "ft": 0.3048,
    "inches": 0.0254,
    "inch": 0.0254,
    "in": 0.0254,
    "centimeters": 0.01,
    "centimeter": 0.01,
    "centimetres": 0.01,
    "centimetre": 0.01,
    "cm": 0.01,
    "meters": 1.0,
    "meter": 1.0,
    "metres": 1.0,
    "metre": 1.0,
    "m": 1.0,
}

# Longest unit spellings first so "meters" wins over "m".
_UNIT_ALT = "|".join(sorted(_UNIT_TO_M, key=len, reverse=True))
_HEIGHT_RE = re.compile(
    rf"(\d+(?:\.\d+)?)[\s-]*({_UNIT_ALT})\b[\s-]*(?:tall|high|in\s+height)\b",
    re.IGNORECASE,
)


@dataclass(frozen=True)
class GenerationBrief:
    title: str
    body: str
    target_height_m: float
    style_notes: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.body.strip():
            raise SchemaError("brief body must be nonempty")
        if not (MIN_HEIGHT_M <= self.target_height_m <= MAX_HEIGHT_M):
            raise SchemaError(
                f"target_height_m {self.target_height_m} outside "
                f"[{MIN_HEIGHT_M}, {MAX_HEIGHT_M}]"
            )

    def request_text(self) -> str:
        parts = [f"{self.title}: {self.body}"]
        parts.append(f"Target height: {self.target_height_m:.4f} meters.")
        if self.style_notes:
            parts.append(f"Style notes: {self.style_notes}")
        return "\n".join(parts)


def extract_height_m(text: str) -> Optional[float]:
    """First stated height in the text, converted to meters.

    Returns None when no height phrasing matches or when every match
    falls outside the sanity bounds.
    """
    for match in _HEIGHT_RE.finditer(text):
        value = float(match.group(1)) * _UNIT_TO_M[match.group(2).lower()]
        if MIN_HEIGHT_M <= value <= MAX_HEIGHT_M:
            return value
    return None


def default_height_for(object_name: str, table: Optional[Mapping] = None) -> float:
    data = table if table is not None else default_size_table()
    classes = data.get("classes", {})
    key = object_name.strip().lower()
    if key in classes:
        return float(classes[key])
    return float(data.get("default_m", 1.0))


def make_brief(
    suggestion: Suggestion,
    size_table: Optional[Mapping] = None,
    style_notes: Optional[str] = None,
) -> GenerationBrief:
    """Build the provider brief for an accepted suggestion.

    Title is the object name; the body is the description verbatim. The
    target height comes from the first height phrase in the description,
    falling back to the class default table.
    """
    if suggestion.status != "accepted":
        raise SchemaError(
            f"briefs are built from accepted suggestions, got status "
            f"{suggestion.status!r} for {suggestion.object_name!r}"
        )
    if not suggestion.description.strip():
        raise MissingDescription(
            f"suggestion {suggestion.object_name!r} has no description to generate from"
        )
    height = extract_height_m(suggestion.description)
    if height is None:
        height = default_height_for(suggestion.object_name, size_table)
    return GenerationBrief(
        title=suggestion.object_name,
        body=suggestion.description,
        target_height_m=height,
        style_notes=style_notes,
    )
