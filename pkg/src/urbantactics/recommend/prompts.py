"""Prompt assembly for the vision-language branch.

PROMPT_TEMPLATE is the exact production wording; tests pin it down to the
character. Substitution is plain string replacement of the three
placeholders, never `str.format`, so braces inside descriptions or file
names cannot break anything.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

from ..errors import MissingAnchor
from ..ingest import Scene
from .summary import SceneSummary

PROMPT_TEMPLATE = """You are given an input image of an urban scene along with an anchor object and a co-occurrence object. Based on the scene in the image, propose five options for a third object that would plausibly fit into the scene in a socially active public space.

For each object, provide:

Object – The object’s name.

Description – A detailed paragraph that can be directly used for text-to-3D generation. This description must specify the object’s appearance, materials, approximate scale, color palette that matches the scene, style cues, likely placement relative to the anchor and co-occurrence objects, and functional details such as geometry, key components, and reasonable dimensions. Ground every detail in the visual context of the provided image so that the 3D model will integrate naturally into the scene. However, do not specify where the object is supposed to be placed in the scene. It should be an independent object without a background. Avoid brand names, unsafe elements, or features that block primary circulation.

Only output the result as a CSV file with exactly two columns: Object and Description. Do not include any other commentary or formatting.

Inputs:

Scene image: {filename}

Anchor object: {object1}

Co-occurrence object: {object2}"""

STRICT_FORMAT_REMINDER = (
    "Strict format reminder: respond with CSV text only. Use exactly two "
    "columns named Object and Description, one header row, five data rows, "
    "and double quotes around any field that contains commas or line breaks. "
    "Do not wrap the output in code fences and do not add commentary."
)

_PLACEHOLDERS = ("{filename}", "{object1}", "{object2}")


@dataclass(frozen=True)
class PromptBundle:
    """Everything a provider call needs, fully resolved."""

    scene_id: str
    anchor: str
    co_object: str
    filename: str
    system_prompt: str
    summary_block: str
    image_refs: Tuple[str, ...] = ()

    @property
    def full_text(self) -> str:
        if not self.summary_block:
            return self.system_prompt
        return f"{self.system_prompt}\n\nScene summary:\n{self.summary_block}"

    def tightened(self) -> "PromptBundle":
        """Same bundle with the strict-format reminder appended."""
        return PromptBundle(
            scene_id=self.scene_id,
            anchor=self.anchor,
            co_object=self.co_object,
            filename=self.filename,
            system_prompt=f"{self.system_prompt}\n\n{STRICT_FORMAT_REMINDER}",
            summary_block=self.summary_block,
            image_refs=self.image_refs,
        )


def render_template(filename: str, anchor: str, co_object: str) -> str:
    text = PROMPT_TEMPLATE
    text = text.replace("{filename}", filename)
    text = text.replace("{object1}", anchor)
    text = text.replace("{object2}", co_object)
    return text


def build_prompt(
    scene: Scene,
    anchor: str,
    co_object: str,
    summary: Optional[SceneSummary] = None,
    user_asserted: bool = False,
) -> PromptBundle:
    """Resolve the template for one (scene, anchor, co-object) pair.

    Both labels must normally be present in the scene's detections; with
    ``user_asserted`` the caller vouches that the objects are visible even
    though the detector missed them, and the presence check is skipped.

    Raises MissingAnchor when a label is absent (and not user-asserted) or
    when anchor and co-object are the same label.
    """
    if anchor == co_object:
        raise MissingAnchor(
            f"anchor and co-occurrence object must differ, both are {anchor!r}"
        )
    if not user_asserted:
        labels = scene.labels()
        for name, role in ((anchor, "anchor"), (co_object, "co-occurrence object")):
            if name not in labels:
                raise MissingAnchor(
                    f"{role} {name!r} is not detected in scene {scene.scene_id}"
                )

    filename = scene.image_uri if scene.image_uri else scene.scene_id
    system_prompt = render_template(filename, anchor, co_object)
    for placeholder in _PLACEHOLDERS:
        if placeholder in system_prompt:
            raise AssertionError(f"unresolved placeholder {placeholder}")

    return PromptBundle(
        scene_id=scene.scene_id,
        anchor=anchor,
        co_object=co_object,
        filename=filename,
        system_prompt=system_prompt,
        summary_block=summary.to_prompt_text() if summary is not None else "",
        image_refs=(scene.image_uri,) if scene.image_uri else (),
    )
