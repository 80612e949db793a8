"""Mesh providers, the generation retry wrapper, and asset persistence."""

import pytest

from urbantactics import config
from urbantactics.errors import (
    AssetNotReady,
    GenerationFailed,
    ProviderError,
    SchemaError,
    UnsupportedFormat,
)
from urbantactics.mesh.assets import load_asset, persist_asset
from urbantactics.mesh.brief import GenerationBrief
from urbantactics.mesh.providers import (
    GEOMETRY_CONSTRAINTS,
    MeshProvider,
    MockMeshProvider,
    ScriptedMeshProvider,
    generate,
    resolve_mesh_provider,
)
from urbantactics.mesh.transform import decimate, normalize

from helpers import unit_cube_obj

BRIEF = GenerationBrief(
    title="Drinking Fountain",
    body="A fountain standing 3.5 feet tall.",
    target_height_m=1.0668,
)
CUBE = unit_cube_obj().encode("utf-8")


class RecordingMeshProvider(MeshProvider):
    def __init__(self, outcomes):
        self.outcomes = list(outcomes)
        self.requests = []

    def generate(self, request_text):
        self.requests.append(request_text)
        outcome = self.outcomes[len(self.requests) - 1]
        if isinstance(outcome, Exception):
            raise outcome
        return outcome, "obj", None


class TestMockProvider:
    FIXTURES = config.demo_path("fixtures", "mesh")

    def test_default_fixture_served(self):
        provider = MockMeshProvider(self.FIXTURES)
        data, fmt, job_ref = provider.generate(BRIEF.request_text())
        assert fmt == "obj"
        assert b"v " in data
        assert job_ref == "mock:default.obj"

    def test_slug_specific_fixture_preferred(self, tmp_path):
        (tmp_path / "drinking-fountain.obj").write_bytes(CUBE)
        provider = MockMeshProvider(tmp_path)
        _data, _fmt, job_ref = provider.generate(BRIEF.request_text())
        assert job_ref == "mock:drinking-fountain.obj"

    def test_missing_everything(self, tmp_path):
        provider = MockMeshProvider(tmp_path)
        with pytest.raises(ProviderError):
            provider.generate(BRIEF.request_text())

    def test_missing_directory(self):
        with pytest.raises(ProviderError):
            MockMeshProvider("/nonexistent/meshes")


class TestGenerate:
    def test_clean_first_attempt(self):
        result = generate(BRIEF, ScriptedMeshProvider([CUBE]))
        assert result.retry_count == 0
        assert result.format == "obj"
        assert result.data == CUBE

    def test_provider_error_then_success(self):
        provider = RecordingMeshProvider([ProviderError("timeout"), CUBE])
        result = generate(BRIEF, provider)
        assert result.retry_count == 1
        assert GEOMETRY_CONSTRAINTS not in provider.requests[0]
        assert provider.requests[1].endswith(GEOMETRY_CONSTRAINTS)

    def test_empty_bytes_counts_as_failure(self):
        provider = ScriptedMeshProvider([b"", CUBE])
        assert generate(BRIEF, provider).retry_count == 1

    def test_exhausted_attempts(self):
        provider = ScriptedMeshProvider([b"", b""])
        with pytest.raises(GenerationFailed) as info:
            generate(BRIEF, provider, max_retries=1)
        assert "Drinking Fountain" in str(info.value)
        assert provider.calls == 2

    def test_unsupported_format_fails_immediately(self):
        provider = ScriptedMeshProvider([(b"glTF...", "glb"), CUBE])
        with pytest.raises(UnsupportedFormat):
            generate(BRIEF, provider)
        assert provider.calls == 1

    def test_zero_retries(self):
        provider = ScriptedMeshProvider([ProviderError("nope")])
        with pytest.raises(GenerationFailed):
            generate(BRIEF, provider, max_retries=0)


def test_resolve_mesh_provider_uris(tmp_path):
    assert isinstance(resolve_mesh_provider(f"mock:{tmp_path}"), MockMeshProvider)
    with pytest.raises(SchemaError):
        resolve_mesh_provider("gopher://old")


class TestPersistence:
    def make_lods(self):
        full = normalize(unit_cube_obj(), 0.8, asset_id="job-1", object_name="Bench")
        return full, decimate(full, 2000)

    def test_round_trip(self, tmp_path):
        full, low = self.make_lods()
        target = persist_asset(tmp_path, full, low, extra_meta={"generation_retries": 1})
        assert target == tmp_path / "job-1"
        assert sorted(p.name for p in target.iterdir()) == [
            "full.obj",
            "low.obj",
            "meta.json",
        ]
        got_full, got_low, meta = load_asset(tmp_path, "job-1")
        assert got_full.mesh == full.mesh
        assert got_low.mesh == low.mesh
        assert got_full.target_height_m == pytest.approx(0.8)
        assert got_full.object_name == "Bench"
        assert meta["generation_retries"] == 1
        assert meta["full"]["triangles"] == 12

    def test_mismatched_ids_rejected(self, tmp_path):
        full, low = self.make_lods()
        other = normalize(unit_cube_obj(), 0.8, asset_id="job-2")
        with pytest.raises(ValueError):
            persist_asset(tmp_path, full, decimate(other, 2000))

    def test_wrong_lod_pairing_rejected(self, tmp_path):
        full, low = self.make_lods()
        with pytest.raises(ValueError):
            persist_asset(tmp_path, low, low)

    def test_missing_asset(self, tmp_path):
        with pytest.raises(AssetNotReady):
            load_asset(tmp_path, "ghost")

    def test_partial_asset(self, tmp_path):
        full, low = self.make_lods()
        persist_asset(tmp_path, full, low)
        (tmp_path / "job-1" / "low.obj").unlink()
        with pytest.raises(AssetNotReady):
            load_asset(tmp_path, "job-1")
