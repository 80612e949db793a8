"""Compact scene descriptions fed into the prompt builder.

The summary is intentionally cheap and fully deterministic: a fixed-seed
palette extraction, a materials lookup keyed on detected classes, and a
coarse near/mid/far banding of detections by where their boxes bottom out
in the frame.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..config import default_materials
from ..errors import EmptyScene, ImageDecodeError
from ..ingest import Scene

PALETTE_SIZE = 5
_MAX_SAMPLE_SIDE = 256
_KMEANS_ITERATIONS = 8


@dataclass(frozen=True)
class SceneSummary:
    """What the scene looks like, condensed for a text prompt."""

    scene_id: str
    scene_type: str
    palette: Tuple[Tuple[int, int, int], ...]
    materials: Tuple[str, ...]
    depth_bands: Mapping[str, Tuple[str, ...]]
    object_counts: Mapping[str, int]

    def to_dict(self) -> dict:
        return {
            "scene_id": self.scene_id,
            "scene_type": self.scene_type,
            "palette": [list(c) for c in self.palette],
            "materials": list(self.materials),
            "depth_bands": {band: list(v) for band, v in self.depth_bands.items()},
            "object_counts": dict(self.object_counts),
        }

    def to_prompt_text(self) -> str:
        """Render as the stable JSON block that gets appended to prompts."""
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def load_image(path: str | Path) -> np.ndarray:
    """Decode an image file into an (H, W, 3) uint8 array.

    Raises ImageDecodeError for missing files and undecodable bytes.
    """
    from PIL import Image, UnidentifiedImageError

    p = Path(path)
    if not p.is_file():
        raise ImageDecodeError(f"image not found: {p}")
    try:
        with Image.open(p) as img:
            rgb = img.convert("RGB")
            arr = np.asarray(rgb, dtype=np.uint8)
    except (UnidentifiedImageError, OSError, ValueError) as exc:
        raise ImageDecodeError(f"cannot decode image {p}: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 3 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ImageDecodeError(f"unexpected image shape {arr.shape} for {p}")
    return arr


def extract_palette(image: np.ndarray, n_colors: int = PALETTE_SIZE) -> List[Tuple[int, int, int]]:
    """Pick ``n_colors`` representative RGB colors, deterministically.

    Uses farthest-point initialization over the distinct colors of a strided
    downsample, then a fixed number of Lloyd iterations. No RNG is involved,
    so identical images always give identical palettes.
    """
    if image.ndim != 3 or image.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) array, got shape {image.shape}")
    if image.shape[0] == 0 or image.shape[1] == 0:
        raise ValueError("empty image")

    step = max(1, int(np.ceil(max(image.shape[0], image.shape[1]) / _MAX_SAMPLE_SIDE)))
    sample = image[::step, ::step].reshape(-1, 3).astype(np.float64)

    distinct, counts = np.unique(sample, axis=0, return_counts=True)
    centers = np.empty((n_colors, 3), dtype=np.float64)
    centers[0] = distinct[int(np.argmax(counts))]
    # Farthest-point seeding; argmax takes the first maximum, and `distinct`
    # is lexicographically sorted, so ties resolve the same way every run.
    dist = np.linalg.norm(distinct - centers[0], axis=1)
    for k in range(1, n_colors):
        centers[k] = distinct[int(np.argmax(dist))]
        dist = np.minimum(dist, np.linalg.norm(distinct - centers[k], axis=1))

    for _ in range(_KMEANS_ITERATIONS):
        d2 = ((sample[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        assign = np.argmin(d2, axis=1)
        for k in range(n_colors):
            members = sample[assign == k]
            if len(members):
                centers[k] = members.mean(axis=0)

    rounded = np.clip(np.rint(centers), 0, 255).astype(int)
    colors = [tuple(int(v) for v in row) for row in rounded]
    # Stable presentation order: dark to light, then channel-wise.
    colors.sort(key=lambda c: (0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2], c))
    return colors


def _depth_band(y: float, h: float) -> str:
    bottom = y + h
    if bottom >= 2.0 / 3.0:
        return "near"
    if bottom >= 1.0 / 3.0:
        return "mid"
    return "far"


def materials_for(labels: Sequence[str], table: Optional[Mapping[str, Sequence[str]]] = None) -> List[str]:
    """Union of known materials for the given class labels, sorted."""
    if table is None:
        table = default_materials()
    found = set()
    for label in labels:
        for m in table.get(label, ()):
            found.add(m)
    return sorted(found)


def summarize_scene(
    scene: Scene,
    image: Optional[np.ndarray] = None,
    materials_table: Optional[Mapping[str, Sequence[str]]] = None,
) -> SceneSummary:
    """Build the summary for one scene.

    The image is optional; without it the palette is empty but the rest of
    the summary is still produced. Raises EmptyScene when the scene has no
    detections at all, since there is nothing to describe.
    """
    if not scene.detections:
        raise EmptyScene(f"scene {scene.scene_id} has no detections")

    bands: Dict[str, List[str]] = {"near": [], "mid": [], "far": []}
    counts: Dict[str, int] = {}
    for det in scene.detections:
        counts[det.label] = counts.get(det.label, 0) + 1
        band = _depth_band(det.bbox[1], det.bbox[3])
        if det.label not in bands[band]:
            bands[band].append(det.label)

    palette: Tuple[Tuple[int, int, int], ...] = ()
    if image is not None:
        palette = tuple(extract_palette(image))

    return SceneSummary(
        scene_id=scene.scene_id,
        scene_type=scene.scene_category,
        palette=palette,
        materials=tuple(materials_for(sorted(counts), materials_table)),
        depth_bands={band: tuple(v) for band, v in bands.items()},
        object_counts=dict(sorted(counts.items())),
    )
