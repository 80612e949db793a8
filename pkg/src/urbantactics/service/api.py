"""HTTP JSON facade over the engine.

Thin by design: routes translate JSON bodies to engine calls and engine
errors to `{code, message, locus?}` with a matching status code. All
workflow logic stays in the engine.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import FileResponse, JSONResponse
from pydantic import BaseModel

from ..errors import (
    AlreadyDecided,
    AnchorNotInScene,
    AssetNotReady,
    EmptyScene,
    GenerationFailed,
    ImageDecodeError,
    InvalidState,
    MalformedResponse,
    MissingAnchor,
    NotAnOption,
    PipelineError,
    ProviderError,
    SchemaError,
    TooFewCandidates,
    UnknownCandidate,
    UnknownScene,
    UnknownSession,
    UnsupportedFormat,
)
from ..ingest import scene_record
from .engine import Engine, canonical_json
from .session import Placement, Session

_STATUS_BY_TYPE = (
    ((UnknownScene, UnknownSession, UnknownCandidate), 404),
    ((InvalidState, AlreadyDecided, AssetNotReady), 409),
    (
        (
            ProviderError,
            MalformedResponse,
            TooFewCandidates,
            GenerationFailed,
            UnsupportedFormat,
        ),
        502,
    ),
    (
        (AnchorNotInScene, NotAnOption, MissingAnchor, ImageDecodeError, EmptyScene),
        422,
    ),
    ((SchemaError,), 400),
)


def _status_for(exc: PipelineError) -> int:
    for types, status in _STATUS_BY_TYPE:
        if isinstance(exc, types):
            return status
    return 500


def _error_code(exc: PipelineError) -> str:
    name = type(exc).__name__
    return re.sub(r"(?<!^)(?=[A-Z])", "_", name).lower()


class CreateSessionBody(BaseModel):
    scene_id: str


class AnchorBody(BaseModel):
    anchor: str


class PairBody(BaseModel):
    co_object: str
    override: bool = False


class DecisionBody(BaseModel):
    rank: int
    decision: str


class PlacementBody(BaseModel):
    asset_id: str
    x: float
    z: float
    rotation_y: float = 0.0
    scale_override: Optional[float] = None


def _session_doc(engine: Engine, session: Session) -> dict:
    return {
        "session": session.to_dict(),
        "jobs": [j.to_dict() for j in engine.jobs.for_session(session.session_id)],
    }


def make_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="urban intervention service")

    @app.exception_handler(PipelineError)
    async def pipeline_error_handler(_request: Request, exc: PipelineError):
        body = {"code": _error_code(exc), "message": str(exc)}
        locus = getattr(exc, "locus", None)
        if locus:
            body["locus"] = locus
        return JSONResponse(status_code=_status_for(exc), content=body)

    @app.get("/scenes")
    def list_scenes():
        return [
            {
                "scene_id": s.scene_id,
                "scene_category": s.scene_category,
                "context_tags": sorted(s.context_tags),
                "detections": len(s.detections),
                "has_image": engine.scene_image_path(s) is not None,
            }
            for s in engine.scenes.values()
        ]

    @app.get("/scenes/{scene_id}")
    def get_scene(scene_id: str):
        scene = engine.scene(scene_id)
        record = scene_record(scene)
        record["has_image"] = engine.scene_image_path(scene) is not None
        return record

    @app.get("/scenes/{scene_id}/image")
    def get_scene_image(scene_id: str):
        scene = engine.scene(scene_id)
        path = engine.scene_image_path(scene)
        if path is None:
            raise UnknownScene(f"scene {scene_id!r} has no image on disk")
        return FileResponse(path)

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        return _session_doc(engine, engine.create_session(body.scene_id))

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_doc(engine, engine.store.get(session_id))

    @app.post("/sessions/{session_id}/anchor")
    def set_anchor(session_id: str, body: AnchorBody):
        return _session_doc(engine, engine.set_anchor(session_id, body.anchor))

    @app.post("/sessions/{session_id}/pair")
    def choose_pair(session_id: str, body: PairBody):
        return _session_doc(
            engine, engine.choose_pair(session_id, body.co_object, override=body.override)
        )

    @app.post("/sessions/{session_id}/candidates")
    def fetch_candidates(session_id: str):
        return _session_doc(engine, engine.fetch_candidates(session_id))

    @app.post("/sessions/{session_id}/decisions")
    def decide(session_id: str, body: DecisionBody):
        return _session_doc(engine, engine.decide(session_id, body.rank, body.decision))

    @app.post("/sessions/{session_id}/placements")
    def place(session_id: str, body: PlacementBody):
        placement = Placement(
            asset_id=body.asset_id,
            x=body.x,
            z=body.z,
            rotation_y=body.rotation_y,
            scale_override=body.scale_override,
        )
        return _session_doc(engine, engine.place_asset(session_id, placement))

    @app.post("/sessions/{session_id}/complete")
    def complete(session_id: str):
        return _session_doc(engine, engine.complete(session_id))

    @app.get("/sessions/{session_id}/export")
    def export_session(session_id: str):
        doc = engine.export_session(session_id)
        return Response(content=canonical_json(doc), media_type="application/json")

    @app.get("/assets/{asset_id}/{lod}.obj")
    def get_asset(asset_id: str, lod: str):
        if lod not in ("full", "low"):
            raise SchemaError(f"lod must be full or low, got {lod!r}")
        path = engine.assets_dir / asset_id / f"{lod}.obj"
        if not path.is_file():
            raise AssetNotReady(f"asset {asset_id!r} has no {lod} LOD on disk")
        return FileResponse(path, media_type="text/plain")

    return app
