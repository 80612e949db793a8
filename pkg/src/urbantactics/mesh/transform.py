"""Scale normalization and grid-clustering decimation.

Both operations are pure functions of their inputs. Normalization scales
uniformly and re-seats the mesh so the ground pivot is at y = 0 with the
horizontal bounding-box center on the y axis. Decimation clusters
vertices on a uniform grid, then restores the exact pivot and height.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from ..errors import EmptyMesh, FlatMesh
from .obj import Mesh, parse_obj, serialize_obj

Vec3 = Tuple[float, float, float]

_GRID_SCAN_LIMIT = 512


@dataclass(frozen=True)
class MeshAsset:
    """A normalized mesh plus the bookkeeping the rest of the app needs."""

    asset_id: str
    mesh: Mesh
    aabb: Tuple[Vec3, Vec3]
    target_height_m: float
    lod: str = "full"
    object_name: str = ""
    provider_job_ref: Optional[str] = None

    def __post_init__(self) -> None:
        if self.lod not in ("full", "low"):
            raise ValueError(f"lod must be 'full' or 'low', got {self.lod!r}")
        if self.target_height_m <= 0:
            raise ValueError("target_height_m must be positive")

    @property
    def triangle_count(self) -> int:
        return self.mesh.triangle_count

    @property
    def height_m(self) -> float:
        return self.aabb[1][1] - self.aabb[0][1]

    def meta(self) -> dict:
        return {
            "asset_id": self.asset_id,
            "object_name": self.object_name,
            "target_height_m": self.target_height_m,
            "lod": self.lod,
            "aabb": [list(self.aabb[0]), list(self.aabb[1])],
            "vertices": self.mesh.vertex_count,
            "triangles": self.mesh.triangle_count,
            "provider_job_ref": self.provider_job_ref,
        }


def _content_id(mesh: Mesh, target_height_m: float) -> str:
    digest = hashlib.sha256()
    digest.update(np.ascontiguousarray(mesh.positions).tobytes())
    digest.update(np.ascontiguousarray(mesh.faces).tobytes())
    digest.update(f"{target_height_m:.9f}".encode())
    return digest.hexdigest()[:12]


def normalize(
    raw: bytes | str | Mesh,
    target_height_m: float,
    asset_id: Optional[str] = None,
    object_name: str = "",
    provider_job_ref: Optional[str] = None,
) -> MeshAsset:
    """Uniformly scale and translate a mesh into scene-ready pose.

    Afterwards the bounding box spans exactly ``target_height_m`` in y,
    rests on y = 0, and is centered on x = z = 0. Winding and topology are
    untouched; only positions move. Raises EmptyMesh when there is no
    geometry and FlatMesh when the bounding box has zero height.
    """
    if target_height_m <= 0:
        raise ValueError("target_height_m must be positive")
    mesh = raw if isinstance(raw, Mesh) else parse_obj(raw)
    if mesh.vertex_count == 0 or mesh.triangle_count == 0:
        raise EmptyMesh("mesh has no triangles to normalize")

    lo = mesh.positions.min(axis=0)
    hi = mesh.positions.max(axis=0)
    height = float(hi[1] - lo[1])
    if height <= 0.0:
        raise FlatMesh("mesh bounding box has zero height, cannot set scale")

    scale = target_height_m / height
    anchor = np.array(
        [(lo[0] + hi[0]) / 2.0, lo[1], (lo[2] + hi[2]) / 2.0], dtype=np.float64
    )
    positions = (mesh.positions - anchor) * scale
    moved = Mesh(
        positions=positions,
        faces=mesh.faces.copy(),
        skeleton=mesh.skeleton,
        dropped_faces=mesh.dropped_faces,
    )
    return MeshAsset(
        asset_id=asset_id or _content_id(moved, target_height_m),
        mesh=moved,
        aabb=moved.aabb(),
        target_height_m=target_height_m,
        lod="full",
        object_name=object_name,
        provider_job_ref=provider_job_ref,
    )


def cluster_vertices(mesh: Mesh, cell_size: float, origin: Vec3 = (0.0, 0.0, 0.0)) -> Mesh:
    """Merge vertices that share a grid cell; faces follow the merge.

    Each cluster is replaced by the centroid of its members, which stays
    inside the cell, so clustering an already-clustered mesh at the same
    grid is an exact no-op. Triangles that collapse (repeated cluster) or
    duplicate another surviving triangle are dropped, and vertices no
    longer referenced by any face are removed.
    """
    if cell_size <= 0:
        raise ValueError("cell_size must be positive")
    if mesh.vertex_count == 0:
        return Mesh(positions=mesh.positions.copy(), faces=mesh.faces.copy())

    rel = (mesh.positions - np.asarray(origin, dtype=np.float64)) / cell_size
    cells = np.floor(rel).astype(np.int64)
    _uniq, labels = np.unique(cells, axis=0, return_inverse=True)
    labels = labels.reshape(-1)
    n_clusters = int(labels.max()) + 1 if len(labels) else 0

    sums = np.zeros((n_clusters, 3), dtype=np.float64)
    np.add.at(sums, labels, mesh.positions)
    counts = np.bincount(labels, minlength=n_clusters).astype(np.float64)
    centroids = sums / counts[:, None]

    if mesh.triangle_count:
        mapped = labels[mesh.faces]
        keep = (
            (mapped[:, 0] != mapped[:, 1])
            & (mapped[:, 1] != mapped[:, 2])
            & (mapped[:, 0] != mapped[:, 2])
        )
        mapped = mapped[keep]
        if len(mapped):
            unordered = np.sort(mapped, axis=1)
            _u, first = np.unique(unordered, axis=0, return_index=True)
            mapped = mapped[np.sort(first)]
    else:
        mapped = np.zeros((0, 3), dtype=np.int64)

    used = np.unique(mapped) if len(mapped) else np.arange(0, dtype=np.int64)
    remap = np.full(n_clusters, -1, dtype=np.int64)
    remap[used] = np.arange(len(used), dtype=np.int64)
    new_positions = centroids[used] if len(used) else np.zeros((0, 3), dtype=np.float64)
    new_faces = remap[mapped] if len(mapped) else mapped

    return Mesh(positions=new_positions, faces=new_faces)


def _restore_pose(mesh: Mesh, target_height_m: float) -> Mesh:
    """Re-seat a clustered mesh: exact ground pivot, exact height, centered.

    Only the y axis is rescaled (by at most a couple of grid cells' worth),
    so every vertex stays inside the pre-clustering bounding box.
    """
    lo = mesh.positions.min(axis=0)
    hi = mesh.positions.max(axis=0)
    height = float(hi[1] - lo[1])
    positions = mesh.positions.copy()
    positions[:, 0] -= (lo[0] + hi[0]) / 2.0
    positions[:, 2] -= (lo[2] + hi[2]) / 2.0
    if height > 0:
        positions[:, 1] = (positions[:, 1] - lo[1]) * (target_height_m / height)
    else:
        positions[:, 1] -= lo[1]
    return Mesh(positions=positions, faces=mesh.faces.copy())


def decimate(asset: MeshAsset, target_triangles: int) -> MeshAsset:
    """Produce the low LOD by vertex clustering on a uniform grid.

    The grid resolution is the finest one (scanning from a single cell
    upward) whose clustered triangle count still fits the budget; the scan
    stops at the first resolution that overshoots. Already-small meshes
    are passed through with only the lod flag changed.
    """
    if asset.lod != "full":
        raise ValueError("decimate expects a full-LOD asset")
    if target_triangles < 1:
        raise ValueError("target_triangles must be positive")
    if asset.mesh.triangle_count <= target_triangles:
        return replace(asset, lod="low")

    lo = np.array(asset.aabb[0], dtype=np.float64)
    hi = np.array(asset.aabb[1], dtype=np.float64)
    longest = float((hi - lo).max())
    origin: Vec3 = (float(lo[0]), float(lo[1]), float(lo[2]))

    best: Optional[Mesh] = None
    for divisions in range(1, _GRID_SCAN_LIMIT + 1):
        cell = longest / divisions
        clustered = cluster_vertices(asset.mesh, cell, origin=origin)
        if clustered.triangle_count > target_triangles:
            break
        best = clustered

    if best is None or best.triangle_count == 0:
        # Even one cell across overshot (cannot happen for sane meshes) or
        # everything collapsed; keep the full geometry rather than nothing.
        return replace(asset, lod="low")

    posed = _restore_pose(best, asset.target_height_m)
    return MeshAsset(
        asset_id=asset.asset_id,
        mesh=posed,
        aabb=posed.aabb(),
        target_height_m=asset.target_height_m,
        lod="low",
        object_name=asset.object_name,
        provider_job_ref=asset.provider_job_ref,
    )
