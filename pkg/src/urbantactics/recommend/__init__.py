"""Two-branch suggestion engine.

Statistical branch: top-k complements straight from the co-occurrence
matrix. Semantic branch: scene summarization, prompt assembly, a
vision-language provider call, CSV parsing with retries, and feasibility
filtering against the scene's context tags.
"""

from .candidates import (
    CandidateBatch,
    Suggestion,
    request_semantic_candidates,
    statistical_candidates,
)
from .csvparse import parse_candidate_csv, serialize_candidates
from .feasibility import FeasibilityRule, apply_feasibility, load_rules
from .prompts import PROMPT_TEMPLATE, PromptBundle, build_prompt
from .providers import MockVlmProvider, VlmProvider, VlmRequest, resolve_vlm_provider
from .summary import SceneSummary, extract_palette, load_image, summarize_scene

__all__ = [
    "CandidateBatch",
    "Suggestion",
    "request_semantic_candidates",
    "statistical_candidates",
    "parse_candidate_csv",
    "serialize_candidates",
    "FeasibilityRule",
    "apply_feasibility",
    "load_rules",
    "PROMPT_TEMPLATE",
    "PromptBundle",
    "build_prompt",
    "MockVlmProvider",
    "VlmProvider",
    "VlmRequest",
    "resolve_vlm_provider",
    "SceneSummary",
    "extract_palette",
    "load_image",
    "summarize_scene",
]
