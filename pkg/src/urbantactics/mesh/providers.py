"""Text-to-3D providers and the retrying generation wrapper."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

from ..errors import GenerationFailed, ProviderError, SchemaError, UnsupportedFormat
from ..recommend.providers import slugify
from .brief import GenerationBrief

GEOMETRY_CONSTRAINTS = (
    "Geometry constraints: output a single connected, watertight mesh with "
    "a clean silhouette, correct real-world proportions, no floating "
    "fragments, and no interior shells."
)

_SUPPORTED_FORMATS = ("obj",)


@dataclass(frozen=True)
class GenerationResult:
    data: bytes
    format: str
    retry_count: int
    job_ref: Optional[str] = None


class MeshProvider:
    """Interface: brief text in, (mesh bytes, format tag, job ref) out."""

    def generate(self, request_text: str) -> Tuple[bytes, str, Optional[str]]:
        raise NotImplementedError


class MockMeshProvider(MeshProvider):
    """Serve fixture meshes keyed by the brief title's slug.

    Looks for `<slug>.obj` in the fixtures directory, then `default.obj`.
    The title is recovered from the first line of the request text, which
    `GenerationBrief.request_text` always starts with.
    """

    def __init__(self, fixtures_dir: Path | str) -> None:
        self.fixtures_dir = Path(fixtures_dir)
        if not self.fixtures_dir.is_dir():
            raise ProviderError(f"fixture directory not found: {self.fixtures_dir}")

    def generate(self, request_text: str) -> Tuple[bytes, str, Optional[str]]:
        title = request_text.split("\n", 1)[0].split(":", 1)[0]
        slug = slugify(title) or "default"
        for name in (f"{slug}.obj", "default.obj"):
            path = self.fixtures_dir / name
            if path.is_file():
                return path.read_bytes(), "obj", f"mock:{name}"
        raise ProviderError(f"no mesh fixture for {slug!r} under {self.fixtures_dir}")


class ScriptedMeshProvider(MeshProvider):
    """Replay a fixed sequence of outcomes (bytes or exceptions)."""

    def __init__(self, outcomes: List) -> None:
        self._outcomes = list(outcomes)
        self.calls = 0

    def generate(self, request_text: str) -> Tuple[bytes, str, Optional[str]]:
        if self.calls >= len(self._outcomes):
            raise ProviderError("scripted mesh provider ran out of outcomes")
        outcome = self._outcomes[self.calls]
        self.calls += 1
        if isinstance(outcome, Exception):
            raise outcome
        if isinstance(outcome, tuple):
            data, fmt = outcome
            return data, fmt, None
        return outcome, "obj", None


class HttpMeshProvider(MeshProvider):
    """POST the brief to a JSON endpoint that answers with OBJ text."""

    def __init__(self, endpoint: str, api_key_env: str, timeout: float = 120.0) -> None:
        self.endpoint = endpoint
        self.api_key_env = api_key_env
        self.timeout = timeout

    def generate(self, request_text: str) -> Tuple[bytes, str, Optional[str]]:
        import httpx

        api_key = os.environ.get(self.api_key_env, "")
        if not api_key:
            raise ProviderError(
                f"missing API key: set the {self.api_key_env} environment variable"
            )
        try:
            resp = httpx.post(
                self.endpoint,
                json={"prompt": request_text, "format": "obj"},
                headers={"Authorization": f"Bearer {api_key}"},
                timeout=self.timeout,
            )
            resp.raise_for_status()
        except httpx.HTTPError as exc:
            raise ProviderError(f"mesh request failed: {exc}") from exc
        job_ref = resp.headers.get("x-job-id")
        return resp.content, "obj", job_ref


def resolve_mesh_provider(uri: str, api_key_env: str = "MESHY_API_KEY") -> MeshProvider:
    if uri.startswith("mock:"):
        return MockMeshProvider(uri[len("mock:"):])
    if uri.startswith("http://") or uri.startswith("https://"):
        return HttpMeshProvider(uri, api_key_env=api_key_env)
    raise SchemaError(f"unrecognized mesh provider URI: {uri!r}")


def generate(
    brief: GenerationBrief,
    provider: MeshProvider,
    max_retries: int = 1,
) -> GenerationResult:
    """Run one brief through a provider with a single tightened retry.

    A raised ProviderError or an empty response counts as a failed
    attempt; the retry appends geometry constraints to the request. When
    every attempt fails, GenerationFailed reports the last cause. An
    unsupported format tag fails immediately since retrying the same
    provider cannot change it.
    """
    attempts = max_retries + 1
    last_cause: Optional[str] = None
    for attempt in range(attempts):
        text = brief.request_text()
        if attempt > 0:
            text = f"{text}\n{GEOMETRY_CONSTRAINTS}"
        try:
            data, fmt, job_ref = provider.generate(text)
        except ProviderError as exc:
            last_cause = str(exc)
            continue
        if fmt not in _SUPPORTED_FORMATS:
            raise UnsupportedFormat(f"provider returned format {fmt!r}, expected obj")
        if not data:
            last_cause = "provider returned empty mesh bytes"
            continue
        return GenerationResult(data=data, format=fmt, retry_count=attempt, job_ref=job_ref)
    raise GenerationFailed(
        f"mesh generation failed after {attempts} attempts for "
        f"{brief.title!r}: {last_cause}"
    )
