"""Text-to-3D generation plus deterministic geometric post-processing.

Interchange format is Wavefront OBJ: positions and triangles are parsed
into arrays, every other line type passes through untouched so normals and
UVs survive a pure position edit.
"""

from .assets import load_asset, persist_asset
from .brief import GenerationBrief, extract_height_m, make_brief
from .obj import Mesh, parse_obj, serialize_obj
from .providers import (
    GenerationResult,
    MeshProvider,
    MockMeshProvider,
    generate,
    resolve_mesh_provider,
)
from .transform import MeshAsset, cluster_vertices, decimate, normalize

__all__ = [
    "load_asset",
    "persist_asset",
    "GenerationBrief",
    "extract_height_m",
    "make_brief",
    "Mesh",
    "parse_obj",
    "serialize_obj",
    "GenerationResult",
    "MeshProvider",
    "MockMeshProvider",
    "generate",
    "resolve_mesh_provider",
    "MeshAsset",
    "cluster_vertices",
    "decimate",
    "normalize",
]

FOOT_M = 0.3048
INCH_M = 0.0254
CM_M = 0.01
