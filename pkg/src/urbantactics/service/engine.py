"""The workflow engine: validates operations, emits events, runs jobs.

Every mutation follows the same shape: take the per-session writer lock,
validate preconditions against the current snapshot (doing any provider
work up front), build one DecisionEvent whose payload carries the full
result, derive the next snapshot with ``apply_event``, and only then
save. A failure anywhere before the save leaves the session untouched.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from ..cooccur import CooccurrenceMatrix
from ..errors import (
    AlreadyDecided,
    AnchorNotInScene,
    AssetNotReady,
    InvalidState,
    NotAnOption,
    SchemaError,
    UnknownCandidate,
    UnknownScene,
)
from ..ingest import Scene, scene_record
from ..mesh.assets import persist_asset
from ..mesh.brief import make_brief
from ..mesh.providers import MeshProvider, generate
from ..mesh.transform import decimate, normalize
from ..recommend.candidates import (
    Suggestion,
    request_semantic_candidates,
    statistical_candidates,
)
from ..recommend.feasibility import FeasibilityRule, apply_feasibility, load_rules
from ..recommend.prompts import build_prompt
from ..recommend.providers import VlmProvider
from ..recommend.summary import SceneSummary, load_image, summarize_scene
from .jobs import JobRecord, JobRunner, JobTable
from .session import DecisionEvent, Placement, Session, apply_event, replay

EXPORT_FORMAT = "intervention-session@1"

Clock = Callable[[], str]


def utc_clock() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class LogicalClock:
    """Deterministic timestamps: a fixed epoch plus a tick per call."""

    def __init__(self, epoch: str = "2000-01-01T00:00:00+00:00") -> None:
        self._epoch = datetime.fromisoformat(epoch)
        self._ticks = 0

    def __call__(self) -> str:
        from datetime import timedelta

        stamp = self._epoch + timedelta(seconds=self._ticks)
        self._ticks += 1
        return stamp.isoformat(timespec="seconds")


def _normalized(name: str) -> str:
    return " ".join(name.lower().split())


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def export_document(
    scene: dict,
    session: Session,
    jobs: Sequence[JobRecord],
    assets: Mapping[str, dict],
) -> dict:
    return {
        "format": EXPORT_FORMAT,
        "scene": scene,
        "session": session.to_dict(),
        "jobs": [j.to_dict() for j in jobs],
        "assets": {k: assets[k] for k in sorted(assets)},
    }


@dataclass(frozen=True)
class ImportedSession:
    scene: dict
    session: Session
    jobs: Tuple[JobRecord, ...]
    assets: Dict[str, dict]

    def document(self) -> dict:
        return export_document(self.scene, self.session, self.jobs, self.assets)


def import_session(doc: dict) -> ImportedSession:
    """Rebuild a session from an exported document and verify its log.

    The decision log is replayed from scratch and must reproduce the
    embedded snapshot exactly; a mismatch means the document was edited
    or produced by something broken.
    """
    if doc.get("format") != EXPORT_FORMAT:
        raise SchemaError(f"unsupported export format: {doc.get('format')!r}")
    session = Session.from_dict(doc["session"])
    replayed = replay(session.decision_log)
    if replayed != session:
        raise SchemaError(
            "decision log does not replay to the stored snapshot; "
            "the document is inconsistent"
        )
    jobs = tuple(
        JobRecord(
            job_id=j["job_id"],
            session_id=j["session_id"],
            rank=j["rank"],
            object_name=j["object_name"],
            status=j["status"],
            asset_id=j.get("asset_id"),
            error=j.get("error"),
        )
        for j in doc.get("jobs", [])
    )
    return ImportedSession(
        scene=doc["scene"],
        session=session,
        jobs=jobs,
        assets=dict(doc.get("assets", {})),
    )


class Engine:
    """Orchestrates sessions over a fixed corpus, matrix, and providers."""

    def __init__(
        self,
        scenes: Iterable[Scene] | Mapping[str, Scene],
        matrix: CooccurrenceMatrix,
        vlm_provider: VlmProvider,
        mesh_provider: MeshProvider,
        assets_dir: Path | str,
        rules: Optional[Sequence[FeasibilityRule]] = None,
        size_table: Optional[dict] = None,
        store=None,
        job_runner: Optional[JobRunner] = None,
        clock: Optional[Clock] = None,
        image_root: Optional[Path] = None,
        ranking_k: int = 5,
        ranking_mode: str = "conditional",
        ranking_exclude: Sequence[str] = ("person",),
        vlm_max_retries: int = 2,
        mesh_max_retries: int = 1,
        lod_triangles: int = 2000,
    ) -> None:
        from .store import SessionStore

        if isinstance(scenes, Mapping):
            self.scenes: Dict[str, Scene] = dict(scenes)
        else:
            self.scenes = {s.scene_id: s for s in scenes}
        self.matrix = matrix
        self.vlm_provider = vlm_provider
        self.mesh_provider = mesh_provider
        self.assets_dir = Path(assets_dir)
        self.rules = list(rules) if rules is not None else load_rules()
        self.size_table = size_table
        self.store = store if store is not None else SessionStore()
        if job_runner is not None:
            self.runner = job_runner
            self.jobs = job_runner.table
        else:
            self.jobs = JobTable()
            self.runner = JobRunner(self.jobs, synchronous=True)
        self.clock: Clock = clock if clock is not None else utc_clock
        self.image_root = image_root
        self.ranking_k = ranking_k
        self.ranking_mode = ranking_mode
        self.ranking_exclude = tuple(ranking_exclude)
        self.vlm_max_retries = vlm_max_retries
        self.mesh_max_retries = mesh_max_retries
        self.lod_triangles = lod_triangles
        self._summaries: Dict[str, SceneSummary] = {}

    @classmethod
    def from_config(cls, cfg, synchronous_jobs: bool = True, clock: Optional[Clock] = None) -> "Engine":
        from ..cooccur import build_matrix, load_snapshot
        from ..ingest import filter_scenes, load_corpus
        from ..mesh.providers import resolve_mesh_provider
        from ..recommend.providers import resolve_vlm_provider
        from .store import SessionStore

        vocab = cfg.load_vocabulary()
        if cfg.corpus_dir is None:
            raise SchemaError("config needs a corpus_dir")
        paths = sorted(Path(cfg.corpus_dir).glob("*.json"))
        parsed = load_corpus(paths, vocab, keep_unknown=cfg.keep_unknown)
        kept = filter_scenes(parsed.scenes, cfg.filter_policy)
        if cfg.matrix_snapshot is not None and Path(cfg.matrix_snapshot).is_file():
            matrix = load_snapshot(
                Path(cfg.matrix_snapshot).read_bytes(), expected_vocab=vocab
            )
        else:
            matrix = build_matrix(kept, vocab)
        table = JobTable()
        runner = JobRunner(table, parallelism=cfg.mesh_parallelism, synchronous=synchronous_jobs)
        return cls(
            scenes=kept,
            matrix=matrix,
            vlm_provider=resolve_vlm_provider(cfg.vlm_provider, cfg.vlm_api_key_env),
            mesh_provider=resolve_mesh_provider(cfg.mesh_provider, cfg.mesh_api_key_env),
            assets_dir=cfg.assets_dir,
            store=SessionStore(cfg.sessions_dir),
            job_runner=runner,
            clock=clock,
            image_root=Path(cfg.corpus_dir),
            ranking_k=cfg.ranking_k,
            ranking_mode=cfg.ranking_mode,
            ranking_exclude=cfg.ranking_exclude,
            vlm_max_retries=cfg.max_retries,
            lod_triangles=cfg.lod_triangles,
        )

    # -- scene access --------------------------------------------------------

    def scene(self, scene_id: str) -> Scene:
        found = self.scenes.get(scene_id)
        if found is None:
            raise UnknownScene(f"scene {scene_id!r} is not in the corpus")
        return found

    def scene_image_path(self, scene: Scene) -> Optional[Path]:
        if not scene.image_uri:
            return None
        p = Path(scene.image_uri)
        if not p.is_absolute() and self.image_root is not None:
            p = self.image_root / p
        return p if p.is_file() else None

    def summary_for(self, scene: Scene) -> SceneSummary:
        cached = self._summaries.get(scene.scene_id)
        if cached is not None:
            return cached
        path = self.scene_image_path(scene)
        image = load_image(path) if path is not None else None
        built = summarize_scene(scene, image)
        self._summaries[scene.scene_id] = built
        return built

    # -- operations ------------------------------------------------------------

    def _append(self, session: Optional[Session], kind: str, payload: dict) -> Session:
        seq = session.next_seq if session is not None else 1
        event = DecisionEvent(seq=seq, kind=kind, payload=payload, at=self.clock())
        updated = apply_event(session, event)
        self.store.save(updated)
        return updated

    def create_session(self, scene_id: str) -> Session:
        scene = self.scene(scene_id)  # raises UnknownScene
        session_id = self.store.allocate_id()
        with self.store.exclusive(session_id):
            return self._append(
                None, "create", {"session_id": session_id, "scene_id": scene.scene_id}
            )

    def set_anchor(self, session_id: str, anchor: str) -> Session:
        with self.store.exclusive(session_id):
            session = self.store.get(session_id)
            if session.state != "created":
                raise InvalidState(
                    f"set_anchor requires state created, session is {session.state}"
                )
            scene = self.scene(session.scene_id)
            if anchor not in scene.labels():
                raise AnchorNotInScene(
                    f"anchor {anchor!r} is not detected in scene {scene.scene_id}"
                )
            options = statistical_candidates(
                self.matrix,
                anchor,
                k=self.ranking_k,
                exclude=self.ranking_exclude,
                mode=self.ranking_mode,
            )
            return self._append(
                session,
                "set_anchor",
                {
                    "anchor": anchor,
                    "statistical_options": [s.to_dict() for s in options],
                },
            )

    def choose_pair(self, session_id: str, co_object: str, override: bool = False) -> Session:
        with self.store.exclusive(session_id):
            session = self.store.get(session_id)
            if session.state != "anchor_set":
                raise InvalidState(
                    f"choose_pair requires state anchor_set, session is {session.state}"
                )
            offered = {s.object_name for s in session.statistical_options}
            if co_object not in offered and not override:
                raise NotAnOption(
                    f"{co_object!r} is not among the statistical options "
                    f"{sorted(offered)}; pass override to choose it anyway"
                )
            if co_object == session.anchor:
                raise NotAnOption("co-occurrence object cannot equal the anchor")
            return self._append(
                session,
                "choose_pair",
                {"co_object": co_object, "override": bool(override)},
            )

    def _merge_candidates(
        self, previous: Sequence[Suggestion], screened: Sequence[Suggestion]
    ) -> List[Suggestion]:
        """Keep decided candidates, replace the rest, re-rank contiguously.

        Order: carried-over decided entries, then fresh proposals, then
        fresh filtered entries. New names that collide with a decided
        entry are dropped so an accepted object cannot reappear.
        """
        decided = [s for s in previous if s.status in ("accepted", "rejected")]
        taken = {_normalized(s.object_name) for s in decided}
        fresh_proposed = [
            s for s in screened
            if s.status == "proposed" and _normalized(s.object_name) not in taken
        ]
        fresh_filtered = [
            s for s in screened
            if s.status == "filtered" and _normalized(s.object_name) not in taken
        ]
        merged = []
        for i, s in enumerate(decided + fresh_proposed + fresh_filtered):
            merged.append(replace(s, rank=i + 1))
        return merged

    def fetch_candidates(self, session_id: str) -> Session:
        with self.store.exclusive(session_id):
            session = self.store.get(session_id)
            if session.state not in ("pair_set", "candidates_ready"):
                raise InvalidState(
                    "fetch_candidates requires state pair_set or candidates_ready, "
                    f"session is {session.state}"
                )
            scene = self.scene(session.scene_id)
            assert session.anchor is not None and session.co_object is not None
            summary = self.summary_for(scene)
            bundle = build_prompt(
                scene, session.anchor, session.co_object, summary, user_asserted=True
            )
            batch = request_semantic_candidates(
                bundle, self.vlm_provider, max_retries=self.vlm_max_retries
            )
            screened = apply_feasibility(batch.suggestions, scene, self.rules)
            merged = self._merge_candidates(session.semantic_candidates, screened)
            kind = "receive_candidates" if session.state == "pair_set" else "reprompt"
            return self._append(
                session,
                kind,
                {
                    "candidates": [s.to_dict() for s in merged],
                    "retry_count": batch.retry_count,
                },
            )

    def decide(self, session_id: str, rank: int, decision: str) -> Session:
        if decision not in ("accept", "reject"):
            raise SchemaError(f"decision must be accept or reject, got {decision!r}")
        with self.store.exclusive(session_id):
            session = self.store.get(session_id)
            if session.state != "candidates_ready":
                raise InvalidState(
                    f"decide requires state candidates_ready, session is {session.state}"
                )
            candidate = session.candidate_at(rank)
            if candidate is None or candidate.status == "filtered":
                raise UnknownCandidate(f"no decidable candidate at rank {rank}")
            if candidate.status != "proposed":
                raise AlreadyDecided(
                    f"candidate at rank {rank} is already {candidate.status}"
                )
            payload = {
                "rank": rank,
                "object_name": candidate.object_name,
                "decision": decision,
            }
            job_record: Optional[JobRecord] = None
            if decision == "accept":
                job_id = f"{session_id}-e{session.next_seq}"
                payload["job_id"] = job_id
                job_record = JobRecord(
                    job_id=job_id,
                    session_id=session_id,
                    rank=rank,
                    object_name=candidate.object_name,
                )
            updated = self._append(session, decision, payload)
            if job_record is not None:
                accepted = updated.candidate_at(rank)
                assert accepted is not None
                self.runner.submit(job_record, self._mesh_work(accepted, session_id, job_record.job_id))
            return updated

    def _mesh_work(self, suggestion: Suggestion, session_id: str, job_id: str) -> Callable[[], str]:
        def work() -> str:
            brief = make_brief(suggestion, self.size_table)
            result = generate(brief, self.mesh_provider, max_retries=self.mesh_max_retries)
            full = normalize(
                result.data,
                brief.target_height_m,
                asset_id=job_id,
                object_name=suggestion.object_name,
                provider_job_ref=result.job_ref,
            )
            low = decimate(full, self.lod_triangles)
            persist_asset(
                self.assets_dir,
                full,
                low,
                extra_meta={
                    "session_id": session_id,
                    "job_id": job_id,
                    "rank": suggestion.rank,
                    "generation_retries": result.retry_count,
                },
            )
            return full.asset_id

        return work

    def place_asset(self, session_id: str, placement: Placement) -> Session:
        with self.store.exclusive(session_id):
            session = self.store.get(session_id)
            if session.state != "candidates_ready":
                raise InvalidState(
                    f"place_asset requires state candidates_ready, session is {session.state}"
                )
            record = self.jobs.by_asset(placement.asset_id)
            if record is None or record.session_id != session_id:
                raise AssetNotReady(
                    f"asset {placement.asset_id!r} has no completed mesh job "
                    f"in session {session_id}"
                )
            return self._append(session, "place", {"placement": placement.to_dict()})

    def complete(self, session_id: str) -> Session:
        with self.store.exclusive(session_id):
            session = self.store.get(session_id)
            if session.state != "candidates_ready":
                raise InvalidState(
                    f"complete requires state candidates_ready, session is {session.state}"
                )
            return self._append(session, "complete", {})

    # -- export ----------------------------------------------------------------

    def _asset_meta(self, asset_id: str) -> Optional[dict]:
        meta_path = self.assets_dir / asset_id / "meta.json"
        if not meta_path.is_file():
            return None
        return json.loads(meta_path.read_text(encoding="utf-8"))

    def export_session(self, session_id: str) -> dict:
        session = self.store.get(session_id)
        scene = self.scene(session.scene_id)
        jobs = self.jobs.for_session(session_id)
        assets: Dict[str, dict] = {}
        for record in jobs:
            if record.status == "done" and record.asset_id:
                meta = self._asset_meta(record.asset_id)
                if meta is not None:
                    assets[record.asset_id] = meta
        return export_document(scene_record(scene), session, jobs, assets)
