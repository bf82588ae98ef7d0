"""Structured slide representation: elements with geometry, style and content.

Drafts are immutable values; edits build new drafts with ``dataclasses.replace``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field, replace
from typing import Any, Union

CANVAS_WIDTH = 1280.0
CANVAS_HEIGHT = 720.0

SLIDE_BOUNDS = "slide_bounds"
SLIDE_CENTER = "slide_center"
RESERVED_IDS = frozenset({SLIDE_BOUNDS, SLIDE_CENTER})

FONT_SIZE_RANGE = (6.0, 96.0)
FONT_WEIGHTS = ("normal", "bold")
TEXT_ALIGNMENTS = ("left", "center", "right")

_COLOR_RE = re.compile(r"^#[0-9A-Fa-f]{6}$")


class SirError(ValueError):
    pass


class ElementNotFound(SirError, KeyError):
    def __init__(self, element_id: str) -> None:
        SirError.__init__(self, f"no element with id {element_id!r}")
        self.element_id = element_id

    def __str__(self) -> str:
        return self.args[0]


class EmptyDraft(SirError):
    pass


class SchemaViolation(SirError):
    def __init__(self, path: str, reason: str) -> None:
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


def is_color(value: object) -> bool:
    return isinstance(value, str) and bool(_COLOR_RE.match(value))


def _is_number(value: object) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


@dataclass(frozen=True)
class Geometry:
    """Axis-aligned box in canvas pixels, origin top-left, y downward.

    Zero sizes are allowed here so reference anchors can be expressed; drafts
    require strictly positive sizes for their elements.
    """

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self) -> None:
        for name in ("x", "y", "w", "h"):
            v = getattr(self, name)
            if not _is_number(v) or not math.isfinite(v):
                raise ValueError(f"geometry.{name} must be a finite number, got {v!r}")
            object.__setattr__(self, name, float(v))
        if self.w < 0 or self.h < 0:
            raise ValueError("geometry sizes must be non-negative")

    @property
    def right(self) -> float:
        return self.x + self.w

    @property
    def bottom(self) -> float:
        return self.y + self.h

    @property
    def cx(self) -> float:
        return self.x + self.w / 2

    @property
    def cy(self) -> float:
        return self.y + self.h / 2

    @property
    def area(self) -> float:
        return self.w * self.h

    def intersection_area(self, other: Geometry) -> float:
        iw = min(self.right, other.right) - max(self.x, other.x)
        ih = min(self.bottom, other.bottom) - max(self.y, other.y)
        return iw * ih if iw > 0 and ih > 0 else 0.0

    def contains(self, other: Geometry, eps: float = 1e-9) -> bool:
        return (
            other.x >= self.x - eps
            and other.y >= self.y - eps
            and other.right <= self.right + eps
            and other.bottom <= self.bottom + eps
        )

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x, self.y, self.w, self.h)


@dataclass(frozen=True)
class Style:
    font_size: float = 18.0
    font_weight: str = "normal"
    font_color: str = "#1A1A1A"
    fill_color: str | None = None
    border_color: str | None = None
    border_width: float = 0.0
    text_alignment: str = "left"
    opacity: float = 1.0

    def __post_init__(self) -> None:
        problem = style_problem(self)
        if problem:
            raise ValueError(problem)
        object.__setattr__(self, "font_size", float(self.font_size))
        object.__setattr__(self, "border_width", float(self.border_width))
        object.__setattr__(self, "opacity", float(self.opacity))
        for name in ("font_color", "fill_color", "border_color"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, v.upper())


def check_style_value(attribute: str, value: Any) -> str | None:
    """Return a reason string if ``value`` is not acceptable for ``attribute``."""
    if attribute == "font_size":
        if not _is_number(value) or not math.isfinite(value):
            return "font_size must be a finite number"
        lo, hi = FONT_SIZE_RANGE
        if not lo <= value <= hi:
            return f"font_size {value} outside [{lo:g}, {hi:g}]"
    elif attribute == "font_weight":
        if value not in FONT_WEIGHTS:
            return f"font_weight must be one of {FONT_WEIGHTS}"
    elif attribute == "font_color":
        if not is_color(value):
            return "font_color must be '#RRGGBB'"
    elif attribute in ("fill_color", "border_color"):
        if value is not None and not is_color(value):
            return f"{attribute} must be '#RRGGBB' or null"
    elif attribute == "border_width":
        if not _is_number(value) or not math.isfinite(value) or value < 0:
            return "border_width must be a finite number >= 0"
    elif attribute == "text_alignment":
        if value not in TEXT_ALIGNMENTS:
            return f"text_alignment must be one of {TEXT_ALIGNMENTS}"
    elif attribute == "opacity":
        if not _is_number(value) or not 0.0 <= value <= 1.0:
            return "opacity must be in [0, 1]"
    else:
        return f"unknown style attribute {attribute!r}"
    return None


STYLE_ATTRIBUTES = (
    "font_size",
    "font_weight",
    "font_color",
    "fill_color",
    "border_color",
    "border_width",
    "text_alignment",
    "opacity",
)


def style_problem(style: Style) -> str | None:
    for name in STYLE_ATTRIBUTES:
        reason = check_style_value(name, getattr(style, name))
        if reason:
            return reason
    return None


# ---------------------------------------------------------------- content


@dataclass(frozen=True)
class TextBody:
    bullets: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "bullets", tuple(self.bullets))
        if not self.bullets or any(not isinstance(b, str) or not b for b in self.bullets):
            raise ValueError("TextBody needs at least one non-empty bullet")


@dataclass(frozen=True)
class Image:
    visual_id: str
    aspect: float = 16 / 9

    def __post_init__(self) -> None:
        if not _is_number(self.aspect) or not math.isfinite(self.aspect) or self.aspect <= 0:
            raise ValueError("image aspect must be > 0")
        object.__setattr__(self, "aspect", float(self.aspect))


@dataclass(frozen=True)
class Title:
    text: str


@dataclass(frozen=True)
class Subtitle:
    text: str


@dataclass(frozen=True)
class Footer:
    text: str


@dataclass(frozen=True)
class TableSummary:
    text: str


@dataclass(frozen=True)
class Empty:
    pass


Content = Union[TextBody, Image, Title, Subtitle, Footer, TableSummary, Empty]

_CONTENT_TAGS: dict[type, str] = {
    TextBody: "text_body",
    Image: "image",
    Title: "title",
    Subtitle: "subtitle",
    Footer: "footer",
    TableSummary: "table_summary",
    Empty: "empty",
}
_TAG_TO_CONTENT = {v: k for k, v in _CONTENT_TAGS.items()}


def text_lines(content: Content) -> list[str]:
    """Text pieces that get laid out, one per paragraph/bullet."""
    if isinstance(content, TextBody):
        return list(content.bullets)
    if isinstance(content, (Title, Subtitle, Footer, TableSummary)):
        return [content.text] if content.text else []
    return []


# ---------------------------------------------------------------- elements and drafts


@dataclass(frozen=True)
class SlideElement:
    id: str
    elem_type: str
    geometry: Geometry
    style: Style = field(default_factory=Style)
    content: Content = field(default_factory=Empty)
    z_order: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise ValueError("element id must be a non-empty string")


@dataclass(frozen=True)
class SlideDraft:
    slide_type: str
    elements: tuple[SlideElement, ...] = ()
    iteration: int = 0
    canvas: tuple[float, float] = (CANVAS_WIDTH, CANVAS_HEIGHT)

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(self.elements))
        if tuple(self.canvas) != (CANVAS_WIDTH, CANVAS_HEIGHT):
            raise ValueError("canvas is fixed at 1280x720")
        object.__setattr__(self, "canvas", (CANVAS_WIDTH, CANVAS_HEIGHT))
        if not isinstance(self.iteration, int) or self.iteration < 0:
            raise ValueError("iteration must be a non-negative integer")
        seen = set()
        for el in self.elements:
            if el.id in seen:
                raise ValueError(f"duplicate element id {el.id!r}")
            if el.id in RESERVED_IDS:
                raise ValueError(f"element id {el.id!r} is reserved")
            if not (el.geometry.w > 0 and el.geometry.h > 0):
                raise ValueError(f"element {el.id!r} must have positive width and height")
            seen.add(el.id)

    @property
    def ids(self) -> list[str]:
        return [el.id for el in self.elements]

    def index_of(self, element_id: str) -> int:
        for i, el in enumerate(self.elements):
            if el.id == element_id:
                return i
        raise ElementNotFound(element_id)

    def replace_element(self, element: SlideElement) -> SlideDraft:
        i = self.index_of(element.id)
        elements = list(self.elements)
        elements[i] = element
        return replace(self, elements=tuple(elements))

    def with_iteration(self, iteration: int) -> SlideDraft:
        if iteration < self.iteration:
            raise ValueError("iteration counter cannot go backwards")
        return replace(self, iteration=iteration)


def get_element(draft: SlideDraft, element_id: str) -> SlideElement:
    """Look up an element; the two reserved ids resolve to synthetic canvas anchors."""
    if element_id == SLIDE_BOUNDS:
        return SlideElement(SLIDE_BOUNDS, "SLIDE_BOUNDS", Geometry(0, 0, CANVAS_WIDTH, CANVAS_HEIGHT), z_order=-1)
    if element_id == SLIDE_CENTER:
        return SlideElement(SLIDE_CENTER, "SLIDE_CENTER", Geometry(CANVAS_WIDTH / 2, CANVAS_HEIGHT / 2, 0, 0), z_order=-1)
    return draft.elements[draft.index_of(element_id)]


def bounding_union(draft: SlideDraft) -> Geometry:
    if not draft.elements:
        raise EmptyDraft("bounding_union needs at least one element")
    xs = [e.geometry.x for e in draft.elements]
    ys = [e.geometry.y for e in draft.elements]
    rs = [e.geometry.right for e in draft.elements]
    bs = [e.geometry.bottom for e in draft.elements]
    x0, y0 = min(xs), min(ys)
    return Geometry(x0, y0, max(rs) - x0, max(bs) - y0)


# ---------------------------------------------------------------- JSON


def content_to_dict(content: Content) -> dict:
    tag = _CONTENT_TAGS[type(content)]
    if isinstance(content, TextBody):
        return {"type": tag, "bullets": list(content.bullets)}
    if isinstance(content, Image):
        return {"type": tag, "visual_id": content.visual_id, "aspect": content.aspect}
    if isinstance(content, Empty):
        return {"type": tag}
    return {"type": tag, "text": content.text}


def style_to_dict(style: Style) -> dict:
    return {name: getattr(style, name) for name in STYLE_ATTRIBUTES}


def element_to_dict(el: SlideElement) -> dict:
    g = el.geometry
    return {
        "id": el.id,
        "elem_type": el.elem_type,
        "z_order": el.z_order,
        "geometry": {"x": g.x, "y": g.y, "w": g.w, "h": g.h},
        "style": style_to_dict(el.style),
        "content": content_to_dict(el.content),
    }


def draft_to_dict(draft: SlideDraft) -> dict:
    return {
        "slide_type": draft.slide_type,
        "canvas": {"width": draft.canvas[0], "height": draft.canvas[1]},
        "iteration": draft.iteration,
        "elements": [element_to_dict(el) for el in draft.elements],
    }


def to_json(draft: SlideDraft) -> bytes:
    """Canonical encoding: fixed key order, shortest round-trip floats, LF, trailing newline."""
    text = json.dumps(draft_to_dict(draft), indent=2, ensure_ascii=False, allow_nan=False)
    return (text + "\n").encode("utf-8")


def _require(obj: Any, key: str, path: str) -> Any:
    if not isinstance(obj, dict):
        raise SchemaViolation(path, "expected an object")
    if key not in obj:
        raise SchemaViolation(f"{path}.{key}" if path else key, "missing")
    return obj[key]


def _number(obj: dict, key: str, path: str) -> float:
    v = _require(obj, key, path)
    if not _is_number(v) or not math.isfinite(v):
        raise SchemaViolation(f"{path}.{key}", "expected a finite number")
    return float(v)


def _string(obj: dict, key: str, path: str) -> str:
    v = _require(obj, key, path)
    if not isinstance(v, str):
        raise SchemaViolation(f"{path}.{key}", "expected a string")
    return v


def content_from_dict(data: Any, path: str) -> Content:
    tag = _require(data, "type", path)
    cls = _TAG_TO_CONTENT.get(tag)
    if cls is None:
        raise SchemaViolation(f"{path}.type", f"unknown content type {tag!r}")
    try:
        if cls is TextBody:
            bullets = _require(data, "bullets", path)
            if not isinstance(bullets, list):
                raise SchemaViolation(f"{path}.bullets", "expected a list")
            return TextBody(tuple(bullets))
        if cls is Image:
            return Image(_string(data, "visual_id", path), _number(data, "aspect", path))
        if cls is Empty:
            return Empty()
        return cls(_string(data, "text", path))
    except ValueError as exc:
        if isinstance(exc, SchemaViolation):
            raise
        raise SchemaViolation(path, str(exc)) from None


def element_from_dict(data: Any, path: str) -> SlideElement:
    geo = _require(data, "geometry", path)
    gpath = f"{path}.geometry"
    geometry = Geometry(*(_number(geo, k, gpath) for k in ("x", "y", "w", "h")))
    sdata = _require(data, "style", path)
    spath = f"{path}.style"
    kwargs = {}
    for name in STYLE_ATTRIBUTES:
        v = _require(sdata, name, spath)
        reason = check_style_value(name, v)
        if reason:
            raise SchemaViolation(f"{spath}.{name}", reason)
        kwargs[name] = v
    z = _require(data, "z_order", path)
    if not isinstance(z, int) or isinstance(z, bool):
        raise SchemaViolation(f"{path}.z_order", "expected an integer")
    element_id = _string(data, "id", path)
    if not element_id:
        raise SchemaViolation(f"{path}.id", "must be non-empty")
    return SlideElement(
        id=element_id,
        elem_type=_string(data, "elem_type", path),
        geometry=geometry,
        style=Style(**kwargs),
        content=content_from_dict(_require(data, "content", path), f"{path}.content"),
        z_order=z,
    )


def draft_from_dict(data: Any) -> SlideDraft:
    if not isinstance(data, dict):
        raise SchemaViolation("", "expected an object")
    canvas = _require(data, "canvas", "")
    if (_number(canvas, "width", "canvas"), _number(canvas, "height", "canvas")) != (CANVAS_WIDTH, CANVAS_HEIGHT):
        raise SchemaViolation("canvas", "canvas must be 1280x720")
    iteration = _require(data, "iteration", "")
    if not isinstance(iteration, int) or isinstance(iteration, bool) or iteration < 0:
        raise SchemaViolation("iteration", "expected a non-negative integer")
    raw_elements = _require(data, "elements", "")
    if not isinstance(raw_elements, list):
        raise SchemaViolation("elements", "expected a list")
    elements = tuple(element_from_dict(e, f"elements[{i}]") for i, e in enumerate(raw_elements))
    try:
        return SlideDraft(_string(data, "slide_type", ""), elements, iteration)
    except ValueError as exc:
        if isinstance(exc, SchemaViolation):
            raise
        raise SchemaViolation("elements", str(exc)) from None


def from_json(raw: bytes | str) -> SlideDraft:
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaViolation("", f"malformed JSON: {exc}") from None
    return draft_from_dict(data)
