"""Builders shared across test modules."""

from __future__ import annotations

from pathlib import Path
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from urbantactics.ingest import Detection, Scene, Vocabulary

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


def det(label: str, confidence: float = 0.8, bbox=(0.1, 0.1, 0.2, 0.2)) -> Detection:
    return Detection(label=label, bbox=tuple(bbox), confidence=confidence)


def scene_with(
    scene_id: str,
    labels: Sequence[str],
    category: str = "plaza",
    tags: Iterable[str] = (),
    persons: int = 0,
    person_conf: float = 0.9,
    image_uri: Optional[str] = None,
) -> Scene:
    dets = [det(label) for label in labels]
    for i in range(persons):
        x = 0.05 + 0.04 * i
        dets.append(Detection("person", (x, 0.5, 0.03, 0.3), person_conf))
    return Scene(
        scene_id=scene_id,
        scene_category=category,
        detections=tuple(dets),
        context_tags=frozenset(tags),
        image_uri=image_uri,
    )


def unit_cube_obj() -> str:
    lines = [
        "v 0 0 0", "v 1 0 0", "v 1 1 0", "v 0 1 0",
        "v 0 0 1", "v 1 0 1", "v 1 1 1", "v 0 1 1",
        "f 1 2 6", "f 1 6 5", "f 4 8 7", "f 4 7 3",
        "f 1 4 3", "f 1 3 2", "f 5 6 7", "f 5 7 8",
        "f 1 5 8", "f 1 8 4", "f 2 3 7", "f 2 7 6",
    ]
    return "\n".join(lines) + "\n"


def icosphere(subdivisions: int) -> Tuple[np.ndarray, np.ndarray]:
    """Unit icosphere: 20 * 4**subdivisions triangles, radius 1, centered."""
    phi = (1.0 + 5.0 ** 0.5) / 2.0
    raw = [
        (-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
        (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
        (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1),
    ]
    positions = [np.array(v, dtype=np.float64) / np.linalg.norm(v) for v in raw]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    for _ in range(subdivisions):
        cache: Dict[Tuple[int, int], int] = {}

        def midpoint(a: int, b: int) -> int:
            key = (a, b) if a < b else (b, a)
            if key in cache:
                return cache[key]
            m = positions[a] + positions[b]
            m /= np.linalg.norm(m)
            positions.append(m)
            cache[key] = len(positions) - 1
            return cache[key]

        next_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            next_faces.extend([(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)])
        faces = next_faces
    return np.array(positions), np.array(faces, dtype=np.int64)


def mesh_to_obj(positions: np.ndarray, faces: np.ndarray) -> str:
    lines = [
        f"v {float(x)!r} {float(y)!r} {float(z)!r}" for x, y, z in positions
    ]
    lines += [f"f {int(a) + 1} {int(b) + 1} {int(c) + 1}" for a, b, c in faces]
    return "\n".join(lines) + "\n"


# Reference top-5 complement orderings the packaged survey matrix realizes,
# per anchor, with "person" excluded from ranking.
SURVEY_TOP5 = {
    "bench": ["window", "tree", "sign", "traffic light", "crosswalk"],
    "tree": ["traffic light", "window", "sidewalk", "door", "planter"],
    "planter": ["tree", "sidewalk", "window", "balcony", "traffic light"],
    "sign": ["traffic light", "window", "crosswalk", "tree", "sidewalk"],
    "sidewalk": ["window", "traffic light", "tree", "planter", "sign"],
    "curb": ["window", "sign", "traffic light", "sidewalk", "crosswalk"],
    "crosswalk": ["traffic light", "window", "sign", "tree", "sidewalk"],
    "fence": ["window", "sidewalk", "tree", "planter", "traffic light"],
    "pole": ["window", "traffic light", "tree", "sign", "crosswalk"],
    "traffic light": ["sign", "window", "tree", "crosswalk", "sidewalk"],
    "lamp": ["window", "door", "tree", "stairs", "sidewalk"],
    "trash can": ["window", "tree", "traffic light", "sign", "door"],
    "bicycle": ["window", "traffic light", "pole", "fence", "sidewalk"],
    "balcony": ["planter", "tree", "sidewalk", "fence", "door"],
    "railing": ["window", "pole", "bicycle", "fence", "sidewalk"],
    "stairs": ["traffic light", "window", "sidewalk", "tree", "door"],
    "door": ["tree", "window", "traffic light", "sidewalk", "crosswalk"],
    "window": ["traffic light", "sidewalk", "pole", "fence", "bicycle"],
}
