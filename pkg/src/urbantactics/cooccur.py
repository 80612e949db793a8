"""Scene-level co-occurrence counts, embedding vectors, and top-k rankings.

Counting is presence-based: each scene contributes its *set* of distinct
classes, and every unordered pair of those classes is incremented once, so
duplicating a detection instance never changes the matrix. The diagonal
stores the per-class anchor count (scenes containing the class) and is
excluded from rankings.

Two normalization modes are supported for embedding vectors:

* ``conditional``: entry j of anchor i's vector is C[i][j] / count(i),
  i.e. the fraction of i's scenes that also contain j (the default);
* ``row_sum``: the off-diagonal row divided by its off-diagonal sum.

Both divide the same integer row by a positive scalar, so the ranked order
of classes is identical in either mode; ``top_k`` therefore compares raw
integer counts (exact, no float ties) and breaks ties by vocabulary index.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from io import StringIO
from typing import Iterable, Literal, Optional, Sequence

import numpy as np

from .errors import SchemaError, UnknownLabel, VocabMismatch
from .ingest import Scene, Vocabulary

Mode = Literal["conditional", "row_sum"]
ExportForm = Literal["counts", "conditional", "row_sum"]


def vocab_hash(vocab: Vocabulary) -> str:
    """Stable digest of the vocabulary, used to validate cached snapshots."""
    payload = json.dumps(vocab.to_dict(), sort_keys=True).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


@dataclass(frozen=True)
class CooccurrenceMatrix:
    """Symmetric pair counts over a corpus; immutable after construction.

    ``counts[i][j]`` = scenes containing both class i and class j;
    ``counts[i][i]`` = ``anchor_counts[i]`` = scenes containing class i.
    """

    vocab: Vocabulary
    counts: np.ndarray  # (n, n) int64, symmetric
    anchor_counts: np.ndarray  # (n,) int64
    scenes_processed: int

    def __post_init__(self) -> None:
        n = self.vocab.size
        counts = np.asarray(self.counts, dtype=np.int64)
        anchors = np.asarray(self.anchor_counts, dtype=np.int64)
        if counts.shape != (n, n) or anchors.shape != (n,):
            raise SchemaError("matrix shape does not match vocabulary size")
        if (counts < 0).any() or (anchors < 0).any() or self.scenes_processed < 0:
            raise SchemaError("co-occurrence counts must be nonnegative")
        if not np.array_equal(counts, counts.T):
            raise SchemaError("co-occurrence counts must be symmetric")
        if not np.array_equal(np.diag(counts), anchors):
            raise SchemaError("diagonal must equal anchor counts")
        if (counts > np.minimum.outer(anchors, anchors)).any():
            raise SchemaError("pair count exceeds an anchor count")
        if (anchors > self.scenes_processed).any():
            raise SchemaError("anchor count exceeds scenes_processed")
        counts.setflags(write=False)
        anchors.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "anchor_counts", anchors)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CooccurrenceMatrix):
            return NotImplemented
        return (
            self.vocab == other.vocab
            and self.scenes_processed == other.scenes_processed
            and np.array_equal(self.counts, other.counts)
        )

    def index(self, label: str) -> int:
        if label not in self.vocab:
            raise UnknownLabel(f'label "{label}" not in vocabulary')
        return self.vocab.index(label)

    def pair_count(self, a: str, b: str) -> int:
        return int(self.counts[self.index(a), self.index(b)])

    def anchor_count(self, label: str) -> int:
        return int(self.anchor_counts[self.index(label)])


@dataclass(frozen=True)
class EmbeddingVector:
    """One anchor's normalized co-occurrence row."""

    anchor: str
    mode: Mode
    values: tuple[float, ...]
    degenerate: bool = False  # anchor absent (or zero off-diagonal row sum)


@dataclass(frozen=True)
class Ranking:
    """Descending (class, score) complements for an anchor; anchor excluded."""

    anchor: str
    entries: tuple[tuple[str, float], ...]


def build_matrix(scenes: Sequence[Scene], vocab: Vocabulary) -> CooccurrenceMatrix:
    """Aggregate scene-level presence into a symmetric pair-count matrix.

    Implemented as P.T @ P over the boolean scene-by-class presence matrix,
    which yields pair counts off-diagonal and anchor counts on the diagonal
    in one pass.
    """
    n = vocab.size
    index = {c: i for i, c in enumerate(vocab.classes)}
    presence = np.zeros((len(scenes), n), dtype=np.int64)
    for row, scene in enumerate(scenes):
        for label in scene.labels():
            col = index.get(label)
            if col is None:
                raise UnknownLabel(
                    f'label "{label}" in scene "{scene.scene_id}" is outside the vocabulary'
                )
            presence[row, col] = 1
    counts = presence.T @ presence
    return CooccurrenceMatrix(
        vocab=vocab,
        counts=counts,
        anchor_counts=np.diag(counts).copy(),
        scenes_processed=len(scenes),
    )


def merge(a: CooccurrenceMatrix, b: CooccurrenceMatrix) -> CooccurrenceMatrix:
    """Entrywise sum; build(S1 + S2) == merge(build(S1), build(S2))."""
    if a.vocab != b.vocab:
        raise VocabMismatch("cannot merge matrices built on different vocabularies")
    return CooccurrenceMatrix(
        vocab=a.vocab,
        counts=a.counts + b.counts,
        anchor_counts=a.anchor_counts + b.anchor_counts,
        scenes_processed=a.scenes_processed + b.scenes_processed,
    )


def embed(m: CooccurrenceMatrix, anchor: str, mode: Mode = "conditional") -> EmbeddingVector:
    """Normalize the anchor's count row into an embedding vector.

    The anchor's own entry is always 0. A zero denominator (anchor never
    seen, or empty off-diagonal row in row_sum mode) yields the all-zero
    vector flagged degenerate.
    """
    i = m.index(anchor)
    row = m.counts[i].astype(np.float64)
    row[i] = 0.0
    if mode == "conditional":
        denom = float(m.anchor_counts[i])
    elif mode == "row_sum":
        denom = float(row.sum())
    else:
        raise ValueError(f"unknown normalization mode: {mode}")
    if denom <= 0:
        return EmbeddingVector(anchor=anchor, mode=mode,
                               values=tuple(0.0 for _ in row), degenerate=True)
    return EmbeddingVector(anchor=anchor, mode=mode, values=tuple(row / denom))


def top_k(
    m: CooccurrenceMatrix,
    anchor: str,
    k: int,
    exclude: Iterable[str] = (),
    mode: Mode = "conditional",
) -> Ranking:
    """Top-k co-occurring classes for an anchor, scored by the embedding.

    Order is decided on the raw integer count row (every mode divides that
    row by the same positive scalar, so the argsort is identical); ties
    break by ascending vocabulary index. Only positive scores qualify, so
    fewer than k entries may be returned.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    i = m.index(anchor)
    excluded = {m.index(label) for label in exclude}
    excluded.add(i)
    order = [
        j for j in sorted(range(m.vocab.size), key=lambda j: (-int(m.counts[i, j]), j))
        if j not in excluded and m.counts[i, j] > 0
    ]
    vec = embed(m, anchor, mode)
    entries = tuple((m.vocab.classes[j], vec.values[j]) for j in order[:k])
    return Ranking(anchor=anchor, entries=entries)


# --- CSV export / parse -----------------------------------------------------

def _grid(m: CooccurrenceMatrix, form: ExportForm) -> list[list]:
    if form == "counts":
        return [[int(v) for v in row] for row in m.counts]
    rows = []
    for anchor in m.vocab.classes:
        vec = embed(m, anchor, form)
        rows.append(list(vec.values))
    return rows


def export_matrix(m: CooccurrenceMatrix, form: ExportForm = "counts") -> str:
    """Render the matrix as CSV with a class-name header row and column.

    Counts are exact integers; normalized forms use fixed 6-decimal reals.
    """
    return format_matrix_csv(m.vocab.classes, _grid(m, form))


def format_matrix_csv(classes: Sequence[str], grid: Sequence[Sequence]) -> str:
    out = StringIO()
    out.write("class," + ",".join(classes) + "\n")
    for name, row in zip(classes, grid):
        cells = [str(v) if isinstance(v, int) else f"{v:.6f}" for v in row]
        out.write(name + "," + ",".join(cells) + "\n")
    return out.getvalue()


def parse_matrix_csv(text: str) -> tuple[tuple[str, ...], list[list]]:
    """Parse a matrix CSV back into (classes, grid); inverse of the exporter."""
    lines = [ln for ln in text.splitlines() if ln]
    if not lines or not lines[0].startswith("class,"):
        raise SchemaError("matrix CSV must start with a class header row")
    classes = tuple(lines[0].split(",")[1:])
    if len(lines) != len(classes) + 1:
        raise SchemaError("matrix CSV row count does not match header")
    grid: list[list] = []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != len(classes) + 1:
            raise SchemaError(f"ragged matrix CSV row: {cells[0]}")
        values = [int(c) if "." not in c else float(c) for c in cells[1:]]
        grid.append(values)
    return classes, grid


# --- snapshot (cacheable JSON form) ----------------------------------------

SNAPSHOT_VERSION = 1


def save_snapshot(m: CooccurrenceMatrix) -> bytes:
    doc = {
        "format_version": SNAPSHOT_VERSION,
        "vocab": m.vocab.to_dict(),
        "vocab_hash": vocab_hash(m.vocab),
        "counts": [[int(v) for v in row] for row in m.counts],
        "anchor_counts": [int(v) for v in m.anchor_counts],
        "scenes_processed": m.scenes_processed,
    }
    return json.dumps(doc, indent=2, sort_keys=True).encode("utf-8")


def load_snapshot(data: bytes, expected_vocab: Optional[Vocabulary] = None) -> CooccurrenceMatrix:
    """Load a snapshot, verifying its embedded vocabulary hash.

    When ``expected_vocab`` is given, the snapshot must have been built
    against that exact vocabulary (cache validation).
    """
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError(f"invalid matrix snapshot: {exc}") from exc
    try:
        vocab = Vocabulary.from_dict(doc["vocab"])
        stored_hash = doc["vocab_hash"]
        counts = np.array(doc["counts"], dtype=np.int64)
        anchors = np.array(doc["anchor_counts"], dtype=np.int64)
        scenes = int(doc["scenes_processed"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed matrix snapshot: {exc}") from exc
    if vocab_hash(vocab) != stored_hash:
        raise SchemaError("snapshot vocab hash mismatch (stale or corrupted snapshot)")
    if expected_vocab is not None and vocab_hash(expected_vocab) != stored_hash:
        raise VocabMismatch("snapshot was built against a different vocabulary")
    return CooccurrenceMatrix(
        vocab=vocab, counts=counts, anchor_counts=anchors, scenes_processed=scenes
    )
