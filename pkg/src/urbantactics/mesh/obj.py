"""Wavefront OBJ reader/writer with pass-through of non-geometry lines.

The parser keeps a line skeleton alongside the position and triangle
arrays. Serializing a mesh whose topology is untouched reproduces every
non-vertex line byte for byte; vertex lines are rewritten from the
(possibly transformed) positions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import UnsupportedFormat

# Skeleton tokens: ("v", k) regenerates vertex k, ("raw", line) is verbatim.
SkeletonToken = Tuple[str, object]


@dataclass
class Mesh:
    positions: np.ndarray  # (V, 3) float64
    faces: np.ndarray  # (F, 3) int64, zero-based
    skeleton: Optional[Tuple[SkeletonToken, ...]] = None
    dropped_faces: int = 0

    def __post_init__(self) -> None:
        self.positions = np.asarray(self.positions, dtype=np.float64).reshape(-1, 3)
        self.faces = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)
        if len(self.faces) and (
            self.faces.min() < 0 or self.faces.max() >= len(self.positions)
        ):
            raise ValueError("face index out of range")

    @property
    def vertex_count(self) -> int:
        return int(len(self.positions))

    @property
    def triangle_count(self) -> int:
        return int(len(self.faces))

    def aabb(self) -> Tuple[Tuple[float, float, float], Tuple[float, float, float]]:
        if not len(self.positions):
            raise ValueError("empty mesh has no bounding box")
        lo = self.positions.min(axis=0)
        hi = self.positions.max(axis=0)
        return (tuple(float(v) for v in lo), tuple(float(v) for v in hi))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Mesh):
            return NotImplemented
        return (
            self.positions.shape == other.positions.shape
            and np.array_equal(self.positions, other.positions)
            and np.array_equal(self.faces, other.faces)
        )


def _looks_binary(text: str) -> bool:
    return "\x00" in text


def _parse_face_ref(token: str, vertex_count: int) -> int:
    head = token.split("/", 1)[0]
    try:
        idx = int(head)
    except ValueError as exc:
        raise UnsupportedFormat(f"bad face index {token!r}") from exc
    if idx > 0:
        zero = idx - 1
    elif idx < 0:
        zero = vertex_count + idx
    else:
        raise UnsupportedFormat("face index 0 is not valid in OBJ")
    return zero


def parse_obj(data: bytes | str) -> Mesh:
    """Parse OBJ text into a Mesh.

    Quads and larger polygons are fan-triangulated. Triangles that repeat
    a vertex index are dropped (counted in ``dropped_faces``). Anything
    that is not a `v` or `f` statement is preserved verbatim. Binary or
    numerically unreadable input raises UnsupportedFormat.
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise UnsupportedFormat("mesh bytes are not UTF-8 text") from exc
    else:
        text = data
    if _looks_binary(text):
        raise UnsupportedFormat("mesh content looks binary, expected OBJ text")

    positions: List[Tuple[float, float, float]] = []
    raw_faces: List[Tuple[str, List[str]]] = []  # (line, ref tokens)
    skeleton: List[SkeletonToken] = []

    for line in text.split("\n"):
        stripped = line.strip()
        parts = stripped.split()
        if parts and parts[0] == "v":
            if len(parts) < 4:
                raise UnsupportedFormat(f"vertex line has too few coordinates: {line!r}")
            try:
                xyz = (float(parts[1]), float(parts[2]), float(parts[3]))
            except ValueError as exc:
                raise UnsupportedFormat(f"unreadable vertex line: {line!r}") from exc
            skeleton.append(("v", len(positions)))
            positions.append(xyz)
        elif parts and parts[0] == "f":
            if len(parts) < 4:
                raise UnsupportedFormat(f"face line has too few vertices: {line!r}")
            raw_faces.append((line, parts[1:]))
            skeleton.append(("raw", line))
        else:
            skeleton.append(("raw", line))

    faces: List[Tuple[int, int, int]] = []
    dropped = 0
    vcount = len(positions)
    for _line, refs in raw_faces:
        idxs = [_parse_face_ref(tok, vcount) for tok in refs]
        for i in idxs:
            if i < 0 or i >= vcount:
                raise UnsupportedFormat(f"face references vertex {i + 1} of {vcount}")
        for a, b in zip(idxs[1:], idxs[2:]):
            tri = (idxs[0], a, b)
            if tri[0] == tri[1] or tri[1] == tri[2] or tri[0] == tri[2]:
                dropped += 1
            else:
                faces.append(tri)

    # Trailing newline splits into an empty final chunk; drop that token so
    # serialization does not grow the file by one blank line per round trip.
    if skeleton and skeleton[-1] == ("raw", ""):
        skeleton.pop()

    return Mesh(
        positions=np.array(positions, dtype=np.float64).reshape(-1, 3),
        faces=np.array(faces, dtype=np.int64).reshape(-1, 3),
        skeleton=tuple(skeleton),
        dropped_faces=dropped,
    )


def _fmt(value: float) -> str:
    return repr(float(value))


def serialize_obj(mesh: Mesh) -> str:
    """Write a mesh back to OBJ text.

    With a skeleton present (a parsed mesh whose topology was not edited),
    non-vertex lines come back verbatim. Without one, a canonical listing
    of `v` lines followed by `f` lines is produced.
    """
    out: List[str] = []
    if mesh.skeleton is not None:
        for kind, payload in mesh.skeleton:
            if kind == "v":
                x, y, z = mesh.positions[int(payload)]  # type: ignore[arg-type]
                out.append(f"v {_fmt(x)} {_fmt(y)} {_fmt(z)}")
            else:
                out.append(str(payload))
    else:
        for x, y, z in mesh.positions:
            out.append(f"v {_fmt(x)} {_fmt(y)} {_fmt(z)}")
        for a, b, c in mesh.faces:
            out.append(f"f {int(a) + 1} {int(b) + 1} {int(c) + 1}")
    return "\n".join(out) + "\n"
