"""Turn a parsed LDL layout plus a slide concept into an initial draft."""

from __future__ import annotations

import logging

from .concepts import SlideConcept
from .ldl import ParsedLayout
from .sir import Content, Empty, Footer, Image, SlideDraft, SlideElement, Subtitle, TableSummary, TextBody, Title
from .zones import IMAGE_ASPECTS, default_style, place_in_zone, resolve_zone

log = logging.getLogger(__name__)

ELEMENT_ID_BASES = {
    "ELEM_TITLE": "title",
    "ELEM_SUBTITLE": "subtitle",
    "ELEM_TEXT_BODY": "text_body",
    "ELEM_IMAGE": "image",
    "ELEM_CHART": "chart",
    "ELEM_TABLE": "table",
    "ELEM_FOOTER": "footer",
    "ELEM_HEADER": "header",
    "ELEM_CONTENT_BLOCK": "content_block",
    "ELEM_FOOTER_FEATURED": "footer_featured",
}
TEXT_RECEIVERS = frozenset({"ELEM_TEXT_BODY", "ELEM_CONTENT_BLOCK"})
VISUAL_RECEIVERS = frozenset({"ELEM_IMAGE", "ELEM_CHART", "ELEM_TABLE"})
FOOTERS = frozenset({"ELEM_FOOTER", "ELEM_FOOTER_FEATURED"})


def partition_bullets(bullets, parts: int) -> list[tuple[str, ...]]:
    """Contiguous, order-preserving even split; earlier parts take the remainder."""
    bullets = tuple(bullets)
    if parts <= 0:
        return []
    base, rem = divmod(len(bullets), parts)
    out, start = [], 0
    for i in range(parts):
        n = base + (1 if i < rem else 0)
        out.append(bullets[start : start + n])
        start += n
    return out


def element_ids(layout: ParsedLayout) -> list[str]:
    counts: dict[str, int] = {}
    ids = []
    for el in layout.elements:
        base = ELEMENT_ID_BASES.get(el.elem_type, el.elem_type.lower())
        counts[base] = counts.get(base, 0) + 1
        ids.append(base if counts[base] == 1 else f"{base}_{counts[base]}")
    return ids


def instantiate(layout: ParsedLayout, concept: SlideConcept, warnings: list[str] | None = None) -> SlideDraft:
    """Build the iteration-0 draft. Problems are appended to ``warnings`` when given."""
    notes: list[str] = []
    ids = element_ids(layout)
    n_text = sum(1 for el in layout.elements if el.elem_type in TEXT_RECEIVERS)
    bullet_parts = iter(partition_bullets(concept.bullet_points, n_text))
    has_subtitle = any(el.elem_type == "ELEM_SUBTITLE" for el in layout.elements)
    visual_left = concept.primary_visual_id

    used: set = set()
    elements = []
    for z, (decl, eid) in enumerate(zip(layout.elements, ids)):
        zone = resolve_zone(decl.positions, layout.slide_type, used)
        used.add(zone.key)
        notes.extend(f"{eid}: {w}" for w in zone.warnings)

        content: Content = Empty()
        aspect = None
        et = decl.elem_type
        if et == "ELEM_TITLE":
            content = Title(concept.slide_title) if concept.slide_title else Empty()
        elif et == "ELEM_SUBTITLE":
            content = Subtitle(concept.key_message) if concept.key_message else Empty()
        elif et in TEXT_RECEIVERS:
            part = next(bullet_parts)
            if part:
                content = TextBody(part)
            else:
                notes.append(f"{eid}: ContentMismatch: no bullet points left for this text body")
        elif et in VISUAL_RECEIVERS:
            if visual_left is None:
                notes.append(f"{eid}: ContentMismatch: concept has no unused visual id")
            elif et == "ELEM_TABLE":
                content = TableSummary(visual_left)
                visual_left = None
            else:
                aspect = concept.primary_visual_aspect or next(
                    (IMAGE_ASPECTS[a] for a in decl.attrs if a in IMAGE_ASPECTS), 16 / 9
                )
                content = Image(visual_left, aspect)
                visual_left = None
        elif et in FOOTERS and not has_subtitle and concept.key_message:
            content = Footer(concept.key_message)

        geometry = place_in_zone(zone.rect, et, decl.attrs, aspect)
        elements.append(SlideElement(eid, et, geometry, default_style(et), content, z))

    for note in notes:
        log.debug("instantiate: %s", note)
    if warnings is not None:
        warnings.extend(notes)
    return SlideDraft(layout.slide_type, tuple(elements), 0)
