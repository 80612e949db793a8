"""Detection-file parsing, vocabulary canonicalization, and activity filtering.

The corpus enters the pipeline as JSON detection files (one list of scene
records per file, see ``parse_detection_file``). Labels are canonicalized
against a :class:`Vocabulary`; scenes then pass a two-stage filter: scene
category first, then a population threshold (at least ``min_people`` person
detections with confidence strictly above ``person_confidence_threshold``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .errors import DuplicateSceneId, SchemaError

# Fixed enumeration of feasibility context tags a scene may carry.
CONTEXT_TAGS = frozenset({
    "street_edge",
    "intersection",
    "sidewalk_ground",
    "grass_ground",
    "plaza_ground",
    "water_adjacent",
    "stairs_present",
    "vehicle_traffic",
})

PERSON = "person"
UNKNOWN_LABEL = "unknown"


@dataclass(frozen=True)
class Detection:
    """One detected object instance with a normalized top-left-origin bbox."""

    label: str
    bbox: tuple[float, float, float, float]  # (x, y, w, h), each in [0, 1]
    confidence: float

    def __post_init__(self) -> None:
        x, y, w, h = self.bbox
        if not (w > 0 and h > 0):
            raise SchemaError(f"bbox must have positive extent, got {self.bbox}")
        if x < 0 or y < 0 or x + w > 1 + 1e-9 or y + h > 1 + 1e-9:
            raise SchemaError(f"bbox out of the unit square: {self.bbox}")
        if not 0.0 <= self.confidence <= 1.0:
            raise SchemaError(f"confidence out of [0,1]: {self.confidence}")


@dataclass(frozen=True)
class Vocabulary:
    """Ordered canonical class names plus an alias map.

    The class index is the class id used everywhere downstream (matrix rows,
    tie-breaking). "person" must be present: the activity filter needs it.
    """

    classes: tuple[str, ...]
    synonyms: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        cleaned = tuple(c.strip().lower() for c in self.classes)
        if any(not c for c in cleaned):
            raise SchemaError("vocabulary contains an empty class name")
        if len(set(cleaned)) != len(cleaned):
            raise SchemaError("vocabulary class names must be unique")
        if PERSON not in cleaned:
            raise SchemaError('vocabulary must contain "person"')
        object.__setattr__(self, "classes", cleaned)
        syn = {a.strip().lower(): c.strip().lower() for a, c in self.synonyms.items()}
        for alias, target in syn.items():
            if target not in cleaned:
                raise SchemaError(f'synonym "{alias}" maps to unknown class "{target}"')
        object.__setattr__(self, "synonyms", syn)

    def __contains__(self, label: str) -> bool:
        return label in self.classes

    def index(self, label: str) -> int:
        return self.classes.index(label)

    @property
    def size(self) -> int:
        return len(self.classes)

    def to_dict(self) -> dict:
        return {"classes": list(self.classes), "synonyms": dict(sorted(self.synonyms.items()))}

    @classmethod
    def from_dict(cls, data: dict) -> "Vocabulary":
        if not isinstance(data.get("classes"), list):
            raise SchemaError('vocabulary file needs a "classes" list')
        return cls(tuple(data["classes"]), dict(data.get("synonyms", {})))

    @classmethod
    def from_file(cls, path) -> "Vocabulary":
        with open(path, "rb") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid vocabulary JSON: {exc}", locus=str(path)) from exc
        return cls.from_dict(data)


@dataclass(frozen=True)
class Scene:
    """An image's identity, category, detections, and feasibility tags."""

    scene_id: str
    scene_category: str
    detections: tuple[Detection, ...]
    context_tags: frozenset[str] = frozenset()
    image_uri: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.scene_id:
            raise SchemaError("scene_id must be nonempty")
        bad = self.context_tags - CONTEXT_TAGS
        if bad:
            raise SchemaError(
                f"unknown context tags {sorted(bad)}", locus=self.scene_id
            )

    def labels(self) -> set[str]:
        """Distinct classes present in the scene."""
        return {d.label for d in self.detections}


@dataclass(frozen=True)
class FilterPolicy:
    """Two-stage activity filter: scene category, then population threshold.

    ``allowed_categories=None`` admits every category. A person detection
    counts toward ``min_people`` only when its confidence is strictly greater
    than ``person_confidence_threshold``.
    """

    allowed_categories: Optional[frozenset[str]] = None
    min_people: int = 5
    person_confidence_threshold: float = 0.35

    def __post_init__(self) -> None:
        if self.min_people < 0:
            raise SchemaError("min_people must be >= 0")
        if not 0.0 <= self.person_confidence_threshold <= 1.0:
            raise SchemaError("person_confidence_threshold must be in [0,1]")
        if self.allowed_categories is not None:
            object.__setattr__(
                self, "allowed_categories", frozenset(self.allowed_categories)
            )


@dataclass(frozen=True)
class ParseResult:
    scenes: tuple[Scene, ...]
    dropped_detections: int  # unmapped labels discarded (keep_unknown=False)


def canonicalize_label(raw: str, vocab: Vocabulary) -> Optional[str]:
    """Map a raw detector label to its canonical class, or None if unmapped.

    Lowercase/trim first, then exact class match, then synonym lookup.
    Total function: never raises.
    """
    token = raw.strip().lower()
    if token in vocab.classes:
        return token
    return vocab.synonyms.get(token)


def parse_detection_file(
    data: bytes, vocab: Vocabulary, *, keep_unknown: bool = False, locus: str = "<bytes>"
) -> ParseResult:
    """Parse a detection file (UTF-8 JSON list of scene records) into Scenes.

    Record shape::

        {scene_id, image_uri?, scene_category, context_tags: [str],
         detections: [{label, confidence, bbox: [x, y, w, h]}]}

    Labels are canonicalized against ``vocab``. Detections whose label has no
    canonical mapping are dropped (counted in the result) unless
    ``keep_unknown`` is set, in which case they are retained under the label
    ``"unknown"``; add "unknown" to the vocabulary if such scenes will feed
    the co-occurrence matrix.
    """
    try:
        records = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError(f"not valid UTF-8 JSON: {exc}", locus=locus) from exc
    if not isinstance(records, list):
        raise SchemaError("top level must be a list of scene records", locus=locus)

    scenes: list[Scene] = []
    seen_ids: set[str] = set()
    dropped = 0
    for idx, rec in enumerate(records):
        where = f"{locus}#{idx}"
        if not isinstance(rec, dict):
            raise SchemaError("scene record must be an object", locus=where)
        try:
            scene_id = rec["scene_id"]
            category = rec["scene_category"]
            raw_dets = rec.get("detections", [])
        except KeyError as exc:
            raise SchemaError(f"missing field {exc}", locus=where) from exc
        if not isinstance(scene_id, str) or not scene_id:
            raise SchemaError("scene_id must be a nonempty string", locus=where)
        if scene_id in seen_ids:
            raise DuplicateSceneId(f'duplicate scene_id "{scene_id}"', locus=where)
        seen_ids.add(scene_id)

        detections: list[Detection] = []
        for di, det in enumerate(raw_dets):
            det_where = f"{where}/detections[{di}]"
            try:
                raw_label = det["label"]
                bbox = det["bbox"]
                conf = det["confidence"]
            except (KeyError, TypeError) as exc:
                raise SchemaError(f"malformed detection: {exc}", locus=det_where) from exc
            if not isinstance(bbox, (list, tuple)) or len(bbox) != 4:
                raise SchemaError("bbox must be [x, y, w, h]", locus=det_where)
            label = canonicalize_label(str(raw_label), vocab)
            if label is None:
                if keep_unknown:
                    label = UNKNOWN_LABEL
                else:
                    dropped += 1
                    continue
            try:
                detections.append(
                    Detection(label=label, bbox=tuple(float(v) for v in bbox),
                              confidence=float(conf))
                )
            except SchemaError as exc:
                raise SchemaError(str(exc), locus=det_where) from exc
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"non-numeric detection field: {exc}", locus=det_where) from exc

        tags = rec.get("context_tags", [])
        if not isinstance(tags, list):
            raise SchemaError("context_tags must be a list", locus=where)
        try:
            scene = Scene(
                scene_id=scene_id,
                scene_category=str(category),
                detections=tuple(detections),
                context_tags=frozenset(str(t) for t in tags),
                image_uri=rec.get("image_uri"),
            )
        except SchemaError as exc:
            raise SchemaError(str(exc), locus=where) from exc
        scenes.append(scene)
    return ParseResult(scenes=tuple(scenes), dropped_detections=dropped)


def scene_record(s: Scene) -> dict:
    """The JSON record shape for one scene (same as the detection files)."""
    rec = {
        "scene_id": s.scene_id,
        "scene_category": s.scene_category,
        "context_tags": sorted(s.context_tags),
        "detections": [
            {"label": d.label, "confidence": d.confidence, "bbox": list(d.bbox)}
            for d in s.detections
        ],
    }
    if s.image_uri is not None:
        rec["image_uri"] = s.image_uri
    return rec


def serialize_scenes(scenes: Iterable[Scene]) -> bytes:
    """Inverse of ``parse_detection_file``; parse(serialize(S)) == S."""
    records = [scene_record(s) for s in scenes]
    return json.dumps(records, indent=2, sort_keys=True).encode("utf-8")


def count_people(scene: Scene, threshold: float) -> int:
    """Person detections strictly above the confidence threshold."""
    return sum(
        1 for d in scene.detections if d.label == PERSON and d.confidence > threshold
    )


def filter_scenes(scenes: Iterable[Scene], policy: FilterPolicy) -> list[Scene]:
    """Apply the two-stage activity filter, preserving input order.

    A scene is retained when its category is allowed and it holds at least
    ``min_people`` person detections with confidence strictly above the
    threshold. Idempotent; never mutates scenes.
    """
    kept = []
    for scene in scenes:
        if (
            policy.allowed_categories is not None
            and scene.scene_category not in policy.allowed_categories
        ):
            continue
        if count_people(scene, policy.person_confidence_threshold) < policy.min_people:
            continue
        kept.append(scene)
    return kept


def load_corpus(
    paths: Iterable, vocab: Vocabulary, *, keep_unknown: bool = False
) -> ParseResult:
    """Parse several detection files into one corpus; ids must be globally unique."""
    all_scenes: list[Scene] = []
    seen: set[str] = set()
    dropped = 0
    for path in paths:
        with open(path, "rb") as fh:
            result = parse_detection_file(
                fh.read(), vocab, keep_unknown=keep_unknown, locus=str(path)
            )
        for scene in result.scenes:
            if scene.scene_id in seen:
                raise DuplicateSceneId(
                    f'duplicate scene_id "{scene.scene_id}" across files', locus=str(path)
                )
            seen.add(scene.scene_id)
            all_scenes.append(scene)
        dropped += result.dropped_detections
    return ParseResult(scenes=tuple(all_scenes), dropped_detections=dropped)
