"""Slide concepts: the upstream planning output consumed by this engine."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any

log = logging.getLogger(__name__)

FUNCTIONAL_TYPES = (
    "title_main",
    "agenda",
    "section_header",
    "content_text_only",
    "content_text_image_left",
    "content_text_image_right",
    "content_image_only",
    "comparison_table",
    "key_takeaways",
    "thank_you_contact",
)

MAX_TITLE_WORDS = 8


class ConceptError(ValueError):
    pass


@dataclass(frozen=True)
class SlideConcept:
    slide_title: str = ""
    key_message: str = ""
    functional_type: str = "content_text_only"
    bullet_points: tuple[str, ...] = ()
    primary_visual_id: str | None = None
    source_unit_ids: tuple[str, ...] = ()
    # width / height of the primary visual when known
    primary_visual_aspect: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "bullet_points", tuple(self.bullet_points))
        object.__setattr__(self, "source_unit_ids", tuple(self.source_unit_ids))
        if self.functional_type not in FUNCTIONAL_TYPES:
            raise ConceptError(f"unknown functional_type {self.functional_type!r}")
        if any(not isinstance(b, str) or not b.strip() for b in self.bullet_points):
            raise ConceptError("bullet points must be non-empty strings")
        if self.primary_visual_aspect is not None and not self.primary_visual_aspect > 0:
            raise ConceptError("primary_visual_aspect must be > 0")

    def warnings(self) -> list[str]:
        out = []
        if len(self.slide_title.split()) > MAX_TITLE_WORDS:
            out.append(f"slide title has more than {MAX_TITLE_WORDS} words")
        return out

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["bullet_points"] = list(self.bullet_points)
        d["source_unit_ids"] = list(self.source_unit_ids)
        return d

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SlideConcept:
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            log.debug("ignoring unknown concept fields %s", sorted(unknown))
        return cls(**{k: v for k, v in data.items() if k in known})


def load_concepts(path: str | Path) -> list[SlideConcept]:
    """Read a concepts file: a JSON list of concept objects (or ``{"slides": [...]}``)."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(data, dict):
        data = data.get("slides", data.get("concepts"))
    if not isinstance(data, list):
        raise ConceptError("concepts file must hold a JSON list of slide concepts")
    return [SlideConcept.from_dict(item) for item in data]
