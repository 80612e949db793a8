"""Configuration loading and access to packaged default data files."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .errors import SchemaError
from .ingest import FilterPolicy, Vocabulary


def _data_text(name: str) -> str:
    return resources.files("urbantactics").joinpath("data", name).read_text("utf-8")


def default_vocabulary() -> Vocabulary:
    return Vocabulary.from_dict(json.loads(_data_text("vocab.json")))


def default_materials() -> dict[str, list[str]]:
    return json.loads(_data_text("materials.json"))


def default_size_table() -> dict:
    return json.loads(_data_text("size_defaults.json"))


def default_rules_json() -> list[dict]:
    return json.loads(_data_text("feasibility_rules.json"))


def data_path(*parts: str) -> Path:
    """Path into the packaged data directory."""
    return Path(str(resources.files("urbantactics").joinpath("data", *parts)))


def demo_path(*parts: str) -> Path:
    """Path into the packaged demo corpus/fixtures."""
    return data_path("demo", *parts)


@dataclass
class AppConfig:
    """Runtime configuration for the CLI and the HTTP service.

    Provider endpoints use URL-ish schemes: ``mock:<fixtures dir>`` selects
    the offline scripted provider, anything ``http(s)://`` goes over the
    network (API key read from the named env var).
    """

    corpus_dir: Optional[Path] = None
    vocab_path: Optional[Path] = None
    matrix_snapshot: Optional[Path] = None
    assets_dir: Path = Path("assets")
    sessions_dir: Optional[Path] = None

    vlm_provider: str = "mock:" + str(demo_path("fixtures", "vlm"))
    mesh_provider: str = "mock:" + str(demo_path("fixtures", "mesh"))
    vlm_api_key_env: str = "URBANTACTICS_VLM_KEY"
    mesh_api_key_env: str = "MESHY_API_KEY"
    max_retries: int = 2

    filter_policy: FilterPolicy = field(default_factory=FilterPolicy)
    keep_unknown: bool = False

    ranking_k: int = 5
    ranking_mode: str = "conditional"
    ranking_exclude: tuple[str, ...] = ("person",)

    lod_triangles: int = 2000
    mesh_parallelism: int = 2

    @classmethod
    def from_file(cls, path: Path) -> "AppConfig":
        try:
            raw = json.loads(Path(path).read_text("utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise SchemaError(f"cannot read config: {exc}", locus=str(path)) from exc
        return cls.from_dict(raw, base=Path(path).parent)

    @classmethod
    def from_dict(cls, raw: dict, base: Path = Path(".")) -> "AppConfig":
        def p(key):
            return (base / raw[key]).resolve() if key in raw and raw[key] else None

        policy_raw = raw.get("filter_policy", {})
        categories = policy_raw.get("allowed_categories")
        policy = FilterPolicy(
            allowed_categories=frozenset(categories) if categories else None,
            min_people=policy_raw.get("min_people", 5),
            person_confidence_threshold=policy_raw.get("person_confidence_threshold", 0.35),
        )
        cfg = cls(
            corpus_dir=p("corpus_dir"),
            vocab_path=p("vocab_path"),
            matrix_snapshot=p("matrix_snapshot"),
            assets_dir=p("assets_dir") or Path("assets"),
            sessions_dir=p("sessions_dir"),
            filter_policy=policy,
            keep_unknown=raw.get("keep_unknown", False),
            ranking_k=raw.get("ranking_k", 5),
            ranking_mode=raw.get("ranking_mode", "conditional"),
            ranking_exclude=tuple(raw.get("ranking_exclude", ["person"])),
            lod_triangles=raw.get("lod_triangles", 2000),
            mesh_parallelism=raw.get("mesh_parallelism", 2),
            max_retries=raw.get("max_retries", 2),
        )
        for key in ("vlm_provider", "mesh_provider", "vlm_api_key_env", "mesh_api_key_env"):
            if key in raw:
                setattr(cfg, key, raw[key])
        return cfg

    def load_vocabulary(self) -> Vocabulary:
        if self.vocab_path is not None:
            return Vocabulary.from_file(self.vocab_path)
        return default_vocabulary()
