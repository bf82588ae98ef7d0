"""Numeric zone grid, size rules and the default style sheet.

All layout constants used by the instantiator live here so tests can refer
to them by name.
"""

from __future__ import annotations

from dataclasses import dataclass

from .sir import CANVAS_HEIGHT, CANVAS_WIDTH, Geometry, Style

OUTER_MARGIN = 32.0
GUTTER = 24.0  # each side of the vertical centre line
CENTER_HALF_WIDTH = 448.0
BAND_PADDING = 8.0

# Vertical bands partition [0, 720].
BANDS: dict[str, tuple[float, float]] = {
    "top": (0.0, 130.0),
    "middle": (130.0, 640.0),
    "bottom": (640.0, CANVAS_HEIGHT),
}

_MID = CANVAS_WIDTH / 2
COLUMNS: dict[str, tuple[float, float]] = {
    "full": (OUTER_MARGIN, CANVAS_WIDTH - OUTER_MARGIN),
    "left": (OUTER_MARGIN, _MID - GUTTER),
    "right": (_MID + GUTTER, CANVAS_WIDTH - OUTER_MARGIN),
    "center": (_MID - CENTER_HALF_WIDTH, _MID + CENTER_HALF_WIDTH),
}

# Thirds of the padded middle band, for the hierarchical quadrant tokens.
SUBBANDS = ("upper", "center", "lower")

# token -> (column, band, sub-band); None leaves that axis untouched
POSITION_ZONES: dict[str, tuple[str | None, str | None, str | None]] = {
    "POS_TOP": (None, "top", None),
    "POS_MIDDLE": (None, "middle", None),
    "POS_BOTTOM": (None, "bottom", None),
    "POS_LEFT": ("left", None, None),
    "POS_CENTER": ("center", None, None),
    "POS_RIGHT": ("right", None, None),
    "POS_FULL_WIDTH": ("full", None, None),
    "POS_HALF_WIDTH_LEFT": ("left", None, None),
    "POS_HALF_WIDTH_RIGHT": ("right", None, None),
    "POS_TOP_LEFT": ("left", "top", None),
    "POS_TOP_RIGHT": ("right", "top", None),
    "POS_BOTTOM_LEFT": ("left", "bottom", None),
    "POS_BOTTOM_RIGHT": ("right", "bottom", None),
    "POS_MIDDLE_LEFT_UPPER": ("left", "middle", "upper"),
    "POS_MIDDLE_LEFT_CENTER": ("left", "middle", "center"),
    "POS_MIDDLE_LEFT_LOWER": ("left", "middle", "lower"),
    "POS_MIDDLE_RIGHT": ("right", "middle", None),
    "POS_MIDDLE_RIGHT_UPPER": ("right", "middle", "upper"),
    "POS_MIDDLE_RIGHT_CENTER": ("right", "middle", "center"),
    "POS_MIDDLE_RIGHT_LOWER": ("right", "middle", "lower"),
    "POS_CENTER_HORIZONTAL": ("center", None, None),
    "POS_CENTER_VERTICAL": (None, "middle", None),
    "POS_BOTTOM_MIDDLE_SECTION": (None, "middle", "lower"),
}

ZoneKey = tuple[str, str, "str | None"]  # (band, column, sub-band)

# Fallback zones, in the order they are handed out to elements without positions.
DEFAULT_ZONES: dict[str, tuple[ZoneKey, ...]] = {
    "SLIDE_TITLE": (("top", "center", None), ("middle", "center", None), ("bottom", "center", None)),
    "SLIDE_CONTENT_SINGLE_COL": (("top", "full", None), ("middle", "full", None), ("bottom", "full", None)),
    "SLIDE_CONTENT_TWO_COL": (
        ("top", "full", None),
        ("middle", "left", None),
        ("middle", "right", None),
        ("bottom", "full", None),
    ),
    "SLIDE_SECTION_HEADER": (("middle", "center", None), ("bottom", "center", None), ("top", "center", None)),
    "SLIDE_IMAGE_CAPTION": (("top", "full", None), ("middle", "center", None), ("bottom", "center", None)),
    "SLIDE_BLANK": (("middle", "full", None), ("top", "full", None), ("bottom", "full", None)),
}
OVERFLOW_ZONE: ZoneKey = ("middle", "full", None)


def zone_rect(key: ZoneKey) -> Geometry:
    band, column, sub = key
    y0, y1 = BANDS[band]
    y0, y1 = y0 + BAND_PADDING, y1 - BAND_PADDING
    if sub is not None:
        third = (y1 - y0) / 3
        k = SUBBANDS.index(sub)
        y0, y1 = y0 + k * third, y0 + (k + 1) * third
    x0, x1 = COLUMNS[column]
    return Geometry(x0, y0, x1 - x0, y1 - y0)


@dataclass(frozen=True)
class ZoneResolution:
    key: ZoneKey
    rect: Geometry
    warnings: tuple[str, ...] = ()


def resolve_zone(positions, slide_type: str, used: frozenset | set = frozenset()) -> ZoneResolution:
    """Intersect the bands/columns named by ``positions``.

    With no positions, the first default zone of ``slide_type`` not in ``used``
    is returned. Conflicting tokens resolve to the later one, with a warning.
    """
    positions = list(positions)
    if not positions:
        for key in DEFAULT_ZONES.get(slide_type, DEFAULT_ZONES["SLIDE_BLANK"]):
            if key not in used:
                return ZoneResolution(key, zone_rect(key))
        return ZoneResolution(
            OVERFLOW_ZONE, zone_rect(OVERFLOW_ZONE), ("default zones exhausted; using middle band",)
        )

    column = band = sub = None
    warnings = []
    for token in positions:
        c, b, s = POSITION_ZONES[token]
        if c is not None:
            if column is not None and column != c:
                warnings.append(f"{token} overrides column {column!r} with {c!r}")
            column = c
        if b is not None:
            if band is not None and band != b:
                warnings.append(f"{token} overrides band {band!r} with {b!r}")
                sub = None
            band = b
        if s is not None:
            if sub is not None and sub != s:
                warnings.append(f"{token} overrides sub-band {sub!r} with {s!r}")
            sub = s
    key: ZoneKey = (band or "middle", column or "full", sub if (band or "middle") == "middle" else None)
    return ZoneResolution(key, zone_rect(key), tuple(warnings))


# ---------------------------------------------------------------- sizes

BASE_FRACTIONS: dict[str, tuple[float, float]] = {
    "ELEM_TITLE": (0.95, 0.95),
    "ELEM_SUBTITLE": (0.9, 0.8),
    "ELEM_TEXT_BODY": (0.95, 0.9),
    "ELEM_IMAGE": (0.85, 0.85),
    "ELEM_CHART": (0.85, 0.85),
    "ELEM_TABLE": (0.95, 0.9),
    "ELEM_FOOTER": (0.95, 0.8),
    "ELEM_HEADER": (0.95, 0.8),
    "ELEM_CONTENT_BLOCK": (0.95, 0.85),
    "ELEM_FOOTER_FEATURED": (0.95, 0.9),
}

SIZE_SCALE = {"ATTR_SIZE_PRIMARY": 1.0, "ATTR_SIZE_SECONDARY": 0.8}
DENSITY_SCALE = {"ATTR_CONTENT_DENSE": 1.15, "ATTR_CONTENT_SPARSE": 0.85}
TEXT_LENGTH_HEIGHT_SCALE = {"ATTR_TEXT_LENGTH_SHORT": 0.9, "ATTR_TEXT_LENGTH_LONG": 1.1}
IMAGE_ASPECTS = {"ATTR_IMAGE_ASPECT_WIDE": 16 / 9, "ATTR_IMAGE_ASPECT_SQUARE": 1.0, "ATTR_IMAGE_ASPECT_TALL": 3 / 4}
VISUAL_ELEMS = frozenset({"ELEM_IMAGE", "ELEM_CHART"})


def size_fractions(elem_type: str, attrs) -> tuple[float, float]:
    """Fractional (w, h) of the zone an element occupies, each in (0, 1]."""
    fw, fh = BASE_FRACTIONS.get(elem_type, (0.9, 0.85))
    for attr in attrs:
        if attr in SIZE_SCALE:
            fw, fh = fw * SIZE_SCALE[attr], fh * SIZE_SCALE[attr]
        elif attr in DENSITY_SCALE:
            fw, fh = fw * DENSITY_SCALE[attr], fh * DENSITY_SCALE[attr]
        elif attr in TEXT_LENGTH_HEIGHT_SCALE:
            fh *= TEXT_LENGTH_HEIGHT_SCALE[attr]
    return min(fw, 1.0), min(fh, 1.0)


def place_in_zone(zone: Geometry, elem_type: str, attrs, aspect: float | None = None) -> Geometry:
    """Shrink ``zone`` by the size rule and centre the result inside it."""
    fw, fh = size_fractions(elem_type, attrs)
    w, h = zone.w * fw, zone.h * fh
    if elem_type in VISUAL_ELEMS:
        if aspect is None:
            aspect = next((IMAGE_ASPECTS[a] for a in attrs if a in IMAGE_ASPECTS), None)
        if aspect is not None:
            if w / h > aspect:
                w = h * aspect
            else:
                h = w / aspect
    return Geometry(zone.x + (zone.w - w) / 2, zone.y + (zone.h - h) / 2, w, h)


# ---------------------------------------------------------------- style sheet

BODY_COLOR = "#1A1A1A"
DEFAULT_STYLES: dict[str, Style] = {
    "ELEM_TITLE": Style(font_size=36, font_weight="bold", font_color=BODY_COLOR, text_alignment="center"),
    "ELEM_SUBTITLE": Style(font_size=24, font_color=BODY_COLOR, text_alignment="center"),
    "ELEM_HEADER": Style(font_size=24, font_color=BODY_COLOR),
    "ELEM_FOOTER": Style(font_size=12, font_color=BODY_COLOR),
    "ELEM_FOOTER_FEATURED": Style(font_size=12, font_color=BODY_COLOR),
}
BODY_STYLE = Style(font_size=18, font_color=BODY_COLOR)


def default_style(elem_type: str) -> Style:
    return DEFAULT_STYLES.get(elem_type, BODY_STYLE)
