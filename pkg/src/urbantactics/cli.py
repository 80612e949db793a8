"""Operator entry points: build, query, run, serve.

`run` drives the entire loop offline against mock providers and is fully
deterministic: a logical clock stamps events, session ids are sequential,
and asset ids hash the geometry, so repeated runs write byte-identical
exports.

Exit codes: 0 success, 2 input/schema problem, 3 domain problem (unknown
anchor, scene, state), 4 provider problem.
"""

from __future__ import annotations

import json
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional, Tuple

import click

from . import cooccur
from .config import AppConfig, data_path, demo_path
from .errors import (
    AlreadyDecided,
    AnchorNotInScene,
    AssetNotReady,
    EmptyMesh,
    EmptyScene,
    FlatMesh,
    GenerationFailed,
    InvalidState,
    MalformedResponse,
    MissingAnchor,
    MissingDescription,
    NotAnOption,
    PipelineError,
    ProviderError,
    SchemaError,
    TooFewCandidates,
    UnknownCandidate,
    UnknownLabel,
    UnknownScene,
    UnknownSession,
    UnsupportedFormat,
)
from .ingest import FilterPolicy, Vocabulary, filter_scenes, load_corpus

EXIT_SCHEMA = 2
EXIT_DOMAIN = 3
EXIT_PROVIDER = 4

_PROVIDER_ERRORS = (
    ProviderError,
    MalformedResponse,
    TooFewCandidates,
    GenerationFailed,
    UnsupportedFormat,
    EmptyMesh,
    FlatMesh,
)
_DOMAIN_ERRORS = (
    UnknownScene,
    UnknownSession,
    UnknownLabel,
    UnknownCandidate,
    AnchorNotInScene,
    NotAnOption,
    InvalidState,
    AlreadyDecided,
    MissingAnchor,
    MissingDescription,
    EmptyScene,
    AssetNotReady,
)


def exit_code_for(exc: PipelineError) -> int:
    if isinstance(exc, _PROVIDER_ERRORS):
        return EXIT_PROVIDER
    if isinstance(exc, _DOMAIN_ERRORS):
        return EXIT_DOMAIN
    return EXIT_SCHEMA


@dataclass
class RunReport:
    """Counts for one offline pipeline run."""

    scenes_in: int = 0
    scenes_filtered: int = 0
    anchors_queried: int = 0
    candidates_proposed: int = 0
    candidates_filtered: int = 0
    candidates_accepted: int = 0
    provider_retries: int = 0
    elapsed_s: float = 0.0

    def __post_init__(self) -> None:
        counts = (
            self.scenes_in,
            self.scenes_filtered,
            self.anchors_queried,
            self.candidates_proposed,
            self.candidates_filtered,
            self.candidates_accepted,
            self.provider_retries,
        )
        if any(c < 0 for c in counts):
            raise ValueError("report counts must be nonnegative")
        if self.candidates_filtered > self.candidates_proposed:
            raise ValueError("filtered count cannot exceed proposed count")

    def lines(self) -> List[str]:
        return [
            f"scenes in:            {self.scenes_in}",
            f"scenes kept:          {self.scenes_filtered}",
            f"anchors queried:      {self.anchors_queried}",
            f"candidates proposed:  {self.candidates_proposed}",
            f"candidates filtered:  {self.candidates_filtered}",
            f"candidates accepted:  {self.candidates_accepted}",
            f"provider retries:     {self.provider_retries}",
            f"elapsed:              {self.elapsed_s:.2f}s",
        ]


def _resolve(workdir: Path, value: Optional[Path]) -> Optional[Path]:
    if value is None:
        return None
    value = Path(value)
    return value if value.is_absolute() else workdir / value


def _load_config(config_path: Optional[Path], workdir: Path) -> AppConfig:
    if config_path is not None:
        return AppConfig.from_file(config_path)
    return AppConfig(
        corpus_dir=demo_path("corpus"),
        matrix_snapshot=data_path("survey_matrix.json"),
        assets_dir=workdir / "assets",
    )


@click.group()
@click.option(
    "--config", "config_path", type=click.Path(exists=True, path_type=Path),
    default=None, help="Config file (JSON). Defaults to the packaged demo setup.",
)
@click.option(
    "--workdir", type=click.Path(path_type=Path), default=Path("."),
    help="Base directory for relative paths and outputs.",
)
@click.pass_context
def main(ctx: click.Context, config_path: Optional[Path], workdir: Path) -> None:
    """Co-occurrence driven urban intervention pipeline."""
    workdir = workdir.resolve()
    ctx.obj = {
        "workdir": workdir,
        "config": _load_config(config_path, workdir),
    }


@main.command("build")
@click.option("--corpus", "corpus_dir", type=click.Path(path_type=Path), default=None,
              help="Directory of detection JSON files.")
@click.option("--vocab", "vocab_path", type=click.Path(path_type=Path), default=None)
@click.option("--out", "out_path", type=click.Path(path_type=Path),
              default=Path("matrix.json"), show_default=True)
@click.option("--csv", "csv_path", type=click.Path(path_type=Path), default=None,
              help="Also write the counts as CSV.")
@click.option("--min-people", type=int, default=None)
@click.option("--person-threshold", type=float, default=None)
@click.option("--category", "categories", multiple=True,
              help="Allowed scene category (repeatable; default: all).")
@click.option("--keep-unknown", is_flag=True, default=False)
@click.pass_context
def cmd_build(
    ctx: click.Context,
    corpus_dir: Optional[Path],
    vocab_path: Optional[Path],
    out_path: Path,
    csv_path: Optional[Path],
    min_people: Optional[int],
    person_threshold: Optional[float],
    categories: Tuple[str, ...],
    keep_unknown: bool,
) -> None:
    """Scan a corpus, apply the activity filter, write the matrix snapshot."""
    workdir: Path = ctx.obj["workdir"]
    cfg: AppConfig = ctx.obj["config"]
    started = time.monotonic()
    try:
        corpus = _resolve(workdir, corpus_dir) or cfg.corpus_dir
        vocab = (
            Vocabulary.from_file(_resolve(workdir, vocab_path))
            if vocab_path is not None
            else cfg.load_vocabulary()
        )
        policy = cfg.filter_policy
        if min_people is not None:
            policy = replace(policy, min_people=min_people)
        if person_threshold is not None:
            policy = replace(policy, person_confidence_threshold=person_threshold)
        if categories:
            policy = replace(policy, allowed_categories=frozenset(categories))

        paths = sorted(Path(corpus).glob("*.json"))
        parsed = load_corpus(paths, vocab, keep_unknown=keep_unknown)
        kept = filter_scenes(parsed.scenes, policy)
        matrix = cooccur.build_matrix(kept, vocab)

        out_file = _resolve(workdir, out_path)
        assert out_file is not None
        out_file.parent.mkdir(parents=True, exist_ok=True)
        out_file.write_bytes(cooccur.save_snapshot(matrix))
        if csv_path is not None:
            csv_file = _resolve(workdir, csv_path)
            assert csv_file is not None
            csv_file.parent.mkdir(parents=True, exist_ok=True)
            csv_file.write_text(cooccur.export_matrix(matrix), encoding="utf-8")
    except PipelineError as exc:
        click.echo(f"build failed: {exc}", err=True)
        raise SystemExit(exit_code_for(exc))

    elapsed = time.monotonic() - started
    click.echo(f"scenes parsed:   {len(parsed.scenes)}")
    click.echo(f"scenes kept:     {len(kept)}")
    click.echo(f"dropped labels:  {parsed.dropped_detections}")
    click.echo(f"vocab hash:      {cooccur.vocab_hash(matrix.vocab)[:12]}")
    click.echo(f"snapshot:        {out_file}")
    if csv_path is not None:
        click.echo(f"counts csv:      {_resolve(workdir, csv_path)}")
    click.echo(f"elapsed:         {elapsed:.2f}s")


@main.command("query")
@click.argument("anchor")
@click.option("--snapshot", "snapshot_path", type=click.Path(path_type=Path), default=None)
@click.option("-k", "top", type=int, default=5, show_default=True)
@click.option("--mode", type=click.Choice(["conditional", "row_sum"]),
              default="conditional", show_default=True)
@click.option("--include-person", is_flag=True, default=False,
              help="Allow 'person' itself to appear in the ranking.")
@click.option("--format", "fmt", type=click.Choice(["table", "csv"]),
              default="table", show_default=True)
@click.pass_context
def cmd_query(
    ctx: click.Context,
    anchor: str,
    snapshot_path: Optional[Path],
    top: int,
    mode: str,
    include_person: bool,
    fmt: str,
) -> None:
    """Print the top co-occurring classes for ANCHOR from a matrix snapshot."""
    workdir: Path = ctx.obj["workdir"]
    cfg: AppConfig = ctx.obj["config"]
    try:
        path = _resolve(workdir, snapshot_path) or cfg.matrix_snapshot
        if path is None or not Path(path).is_file():
            raise SchemaError(f"matrix snapshot not found: {path}")
        matrix = cooccur.load_snapshot(Path(path).read_bytes())
        exclude = () if include_person else ("person",)
        ranking = cooccur.top_k(matrix, anchor, k=top, exclude=exclude, mode=mode)
    except PipelineError as exc:
        click.echo(f"query failed: {exc}", err=True)
        raise SystemExit(exit_code_for(exc))

    if fmt == "csv":
        click.echo("class,score")
        for name, score in ranking.entries:
            click.echo(f"{name},{score:.6f}")
    else:
        width = max((len(name) for name, _ in ranking.entries), default=5)
        for i, (name, score) in enumerate(ranking.entries, start=1):
            click.echo(f"{i}. {name:<{width}}  {score:.6f}")
    if not ranking.entries:
        click.echo(f"(no co-occurrences recorded for {anchor!r})", err=True)


def _load_decisions(path: Optional[Path]) -> Optional[List[dict]]:
    if path is None:
        return None
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read decisions file: {exc}", locus=str(path))
    if not isinstance(data, list):
        raise SchemaError("decisions file must hold a JSON list", locus=str(path))
    for i, entry in enumerate(data):
        if not isinstance(entry, dict) or "action" not in entry:
            raise SchemaError(
                "each decision needs an 'action' field", locus=f"{path}#{i}"
            )
        if entry["action"] not in ("accept", "reject", "reprompt"):
            raise SchemaError(
                f"unknown action {entry['action']!r}", locus=f"{path}#{i}"
            )
        if entry["action"] in ("accept", "reject") and "rank" not in entry:
            raise SchemaError(
                f"{entry['action']} needs a 'rank'", locus=f"{path}#{i}"
            )
    return data


@main.command("run")
@click.option("--scene", "scene_id", required=True)
@click.option("--anchor", required=True)
@click.option("--pair", "co_object", required=True)
@click.option("--override", is_flag=True, default=False,
              help="Allow a pair object outside the statistical options.")
@click.option("--decisions", "decisions_path", type=click.Path(path_type=Path),
              default=None, help="JSON list of accept/reject/reprompt steps; "
              "default accepts every proposed candidate.")
@click.option("--out", "out_dir", type=click.Path(path_type=Path),
              default=Path("run-out"), show_default=True)
@click.option("--vlm-fixtures", type=click.Path(path_type=Path), default=None,
              help="Override the VLM provider with mock:<dir>.")
@click.option("--mesh-fixtures", type=click.Path(path_type=Path), default=None,
              help="Override the mesh provider with mock:<dir>.")
@click.pass_context
def cmd_run(
    ctx: click.Context,
    scene_id: str,
    anchor: str,
    co_object: str,
    override: bool,
    decisions_path: Optional[Path],
    out_dir: Path,
    vlm_fixtures: Optional[Path],
    mesh_fixtures: Optional[Path],
) -> None:
    """Drive the full loop headlessly and write the session export."""
    from .service.engine import Engine, LogicalClock, canonical_json

    workdir: Path = ctx.obj["workdir"]
    cfg: AppConfig = ctx.obj["config"]
    out = _resolve(workdir, out_dir)
    assert out is not None
    started = time.monotonic()

    stage = "configure"
    try:
        if vlm_fixtures is not None:
            cfg = replace(cfg, vlm_provider=f"mock:{_resolve(workdir, vlm_fixtures)}")
        if mesh_fixtures is not None:
            cfg = replace(cfg, mesh_provider=f"mock:{_resolve(workdir, mesh_fixtures)}")
        cfg = replace(cfg, assets_dir=out / "assets", sessions_dir=None)
        decisions = _load_decisions(_resolve(workdir, decisions_path))

        stage = "initialize engine"
        engine = Engine.from_config(cfg, synchronous_jobs=True, clock=LogicalClock())
        report = RunReport(
            scenes_in=len(engine.scenes), scenes_filtered=len(engine.scenes)
        )

        stage = "create session"
        session = engine.create_session(scene_id)
        sid = session.session_id

        stage = "set anchor"
        session = engine.set_anchor(sid, anchor)
        report.anchors_queried = 1

        stage = "choose pair"
        session = engine.choose_pair(sid, co_object, override=override)

        stage = "fetch candidates"
        session = engine.fetch_candidates(sid)

        stage = "decide"
        if decisions is None:
            for cand in list(session.semantic_candidates):
                if cand.status == "proposed":
                    session = engine.decide(sid, cand.rank, "accept")
        else:
            for entry in decisions:
                if entry["action"] == "reprompt":
                    session = engine.fetch_candidates(sid)
                else:
                    session = engine.decide(sid, int(entry["rank"]), entry["action"])

        stage = "complete"
        session = engine.complete(sid)
        engine.runner.drain()

        stage = "export"
        doc = engine.export_session(sid)
        out.mkdir(parents=True, exist_ok=True)
        export_path = out / "session.json"
        export_path.write_text(canonical_json(doc), encoding="utf-8")
    except PipelineError as exc:
        click.echo(f"[stage: {stage}] {type(exc).__name__}: {exc}", err=True)
        raise SystemExit(exit_code_for(exc))

    proposed = filtered = accepted = retries = 0
    for event in session.decision_log:
        if event.kind in ("receive_candidates", "reprompt"):
            fresh = [
                c for c in event.payload["candidates"]
                if c["status"] in ("proposed", "filtered")
            ]
            proposed += len(fresh)
            filtered += sum(1 for c in fresh if c["status"] == "filtered")
            retries += int(event.payload.get("retry_count", 0))
        elif event.kind == "accept":
            accepted += 1
    for job in engine.jobs.for_session(sid):
        meta = engine._asset_meta(job.asset_id) if job.asset_id else None
        if meta is not None:
            retries += int(meta.get("generation_retries", 0))
    report.candidates_proposed = proposed
    report.candidates_filtered = filtered
    report.candidates_accepted = accepted
    report.provider_retries = retries
    report.elapsed_s = time.monotonic() - started

    click.echo(f"session export:       {export_path}")
    click.echo(f"assets dir:           {cfg.assets_dir}")
    for line in report.lines():
        click.echo(line)


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.pass_context
def cmd_serve(ctx: click.Context, host: str, port: int) -> None:
    """Start the HTTP service over the configured corpus."""
    import uvicorn

    from .service.api import make_app
    from .service.engine import Engine

    cfg: AppConfig = ctx.obj["config"]
    try:
        engine = Engine.from_config(cfg, synchronous_jobs=False)
    except PipelineError as exc:
        click.echo(f"serve failed: {exc}", err=True)
        raise SystemExit(exit_code_for(exc))
    uvicorn.run(make_app(engine), host=host, port=port)


if __name__ == "__main__":
    main()
