"""Vision-language providers behind a one-method interface.

The mock provider reads canned responses from a fixtures directory so the
whole pipeline runs offline and deterministically; the HTTP provider is a
thin client for a real endpoint.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Tuple

from ..errors import ProviderError, SchemaError


@dataclass(frozen=True)
class VlmRequest:
    prompt: str
    image_refs: Tuple[str, ...] = ()


class VlmProvider:
    """Interface: turn a request into raw response text."""

    def complete(self, request: VlmRequest) -> str:
        raise NotImplementedError


def slugify(name: str) -> str:
    return re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-")


_ANCHOR_RE = re.compile(r"^Anchor object: (.+?)\s*$", re.MULTILINE)
_CO_RE = re.compile(r"^Co-occurrence object: (.+?)\s*$", re.MULTILINE)


class MockVlmProvider(VlmProvider):
    """Serve responses from `<fixtures_dir>/<anchor>__<co_object>.csv`.

    The anchor and co-object are read back out of the prompt's Inputs
    block. Numbered variants (`name__1.csv`, `name__2.csv`, ...) script
    successive attempts for the same pair, which is how retry behaviour
    is exercised offline. `default.csv` answers anything without its own
    fixture.
    """

    def __init__(self, fixtures_dir: Path | str) -> None:
        self.fixtures_dir = Path(fixtures_dir)
        if not self.fixtures_dir.is_dir():
            raise ProviderError(f"fixture directory not found: {self.fixtures_dir}")
        self._attempt_counts: Dict[str, int] = {}

    def _key_for(self, request: VlmRequest) -> str:
        anchor = _ANCHOR_RE.search(request.prompt)
        co = _CO_RE.search(request.prompt)
        if not anchor or not co:
            return "default"
        return f"{slugify(anchor.group(1))}__{slugify(co.group(1))}"

    def complete(self, request: VlmRequest) -> str:
        key = self._key_for(request)
        attempt = self._attempt_counts.get(key, 0) + 1
        self._attempt_counts[key] = attempt
        candidates = [
            self.fixtures_dir / f"{key}__{attempt}.csv",
            self.fixtures_dir / f"{key}.csv",
            self.fixtures_dir / f"default__{attempt}.csv",
            self.fixtures_dir / "default.csv",
        ]
        for path in candidates:
            if path.is_file():
                return path.read_text(encoding="utf-8")
        raise ProviderError(
            f"no fixture for {key!r} (attempt {attempt}) under {self.fixtures_dir}"
        )


class ScriptedVlmProvider(VlmProvider):
    """In-memory provider that replays a fixed sequence of responses."""

    def __init__(self, responses: Tuple[str, ...] | list) -> None:
        self._responses = list(responses)
        self.calls = 0

    def complete(self, request: VlmRequest) -> str:
        if self.calls >= len(self._responses):
            raise ProviderError("scripted provider ran out of responses")
        text = self._responses[self.calls]
        self.calls += 1
        return text


class HttpVlmProvider(VlmProvider):
    """POST the prompt to a JSON endpoint and return its `text` field."""

    def __init__(self, endpoint: str, api_key_env: str, timeout: float = 60.0) -> None:
        self.endpoint = endpoint
        self.api_key_env = api_key_env
        self.timeout = timeout

    def complete(self, request: VlmRequest) -> str:
        import httpx

        api_key = os.environ.get(self.api_key_env, "")
        if not api_key:
            raise ProviderError(
                f"missing API key: set the {self.api_key_env} environment variable"
            )
        payload = {"prompt": request.prompt, "images": list(request.image_refs)}
        try:
            resp = httpx.post(
                self.endpoint,
                json=payload,
                headers={"Authorization": f"Bearer {api_key}"},
                timeout=self.timeout,
            )
            resp.raise_for_status()
        except httpx.HTTPError as exc:
            raise ProviderError(f"VLM request failed: {exc}") from exc
        content_type = resp.headers.get("content-type", "")
        if "json" in content_type:
            body = resp.json()
            if isinstance(body, dict) and isinstance(body.get("text"), str):
                return body["text"]
            raise ProviderError("VLM response JSON lacks a string 'text' field")
        return resp.text


def resolve_vlm_provider(uri: str, api_key_env: str = "URBANTACTICS_VLM_KEY") -> VlmProvider:
    """Build a provider from a `mock:<dir>` or http(s) URI."""
    if uri.startswith("mock:"):
        return MockVlmProvider(uri[len("mock:"):])
    if uri.startswith("http://") or uri.startswith("https://"):
        return HttpVlmProvider(uri, api_key_env=api_key_env)
    raise SchemaError(f"unrecognized VLM provider URI: {uri!r}")
