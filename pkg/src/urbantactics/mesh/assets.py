"""Disk layout for finished assets: assets/<asset_id>/{full.obj, low.obj, meta.json}."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional, Tuple

from ..errors import AssetNotReady
from .obj import parse_obj, serialize_obj
from .transform import MeshAsset


def persist_asset(
    assets_dir: Path | str,
    full: MeshAsset,
    low: MeshAsset,
    extra_meta: Optional[dict] = None,
) -> Path:
    """Write both LODs and the metadata file; returns the asset directory."""
    if full.asset_id != low.asset_id:
        raise ValueError("full and low LOD must share an asset_id")
    if full.lod != "full" or low.lod != "low":
        raise ValueError("expected one full and one low LOD asset")
    target = Path(assets_dir) / full.asset_id
    target.mkdir(parents=True, exist_ok=True)
    (target / "full.obj").write_text(serialize_obj(full.mesh), encoding="utf-8")
    (target / "low.obj").write_text(serialize_obj(low.mesh), encoding="utf-8")
    meta = {"full": full.meta(), "low": low.meta()}
    if extra_meta:
        meta.update(extra_meta)
    (target / "meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return target


def load_asset(assets_dir: Path | str, asset_id: str) -> Tuple[MeshAsset, MeshAsset, dict]:
    """Read both LODs back; raises AssetNotReady when files are missing."""
    target = Path(assets_dir) / asset_id
    meta_path = target / "meta.json"
    full_path = target / "full.obj"
    low_path = target / "low.obj"
    for p in (meta_path, full_path, low_path):
        if not p.is_file():
            raise AssetNotReady(f"asset {asset_id!r} is incomplete: missing {p.name}")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))

    def _revive(path: Path, entry: dict, lod: str) -> MeshAsset:
        mesh = parse_obj(path.read_text(encoding="utf-8"))
        return MeshAsset(
            asset_id=asset_id,
            mesh=mesh,
            aabb=mesh.aabb(),
            target_height_m=float(entry["target_height_m"]),
            lod=lod,
            object_name=entry.get("object_name", ""),
            provider_job_ref=entry.get("provider_job_ref"),
        )

    return _revive(full_path, meta["full"], "full"), _revive(low_path, meta["low"], "low"), meta
