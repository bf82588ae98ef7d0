"""The ten parameterized editing primitives, as pure draft -> draft functions.

Every primitive validates before it builds anything, so a failing call leaves
the caller's draft untouched. None of them clamp to the canvas; leaving the
slide is reported by the critics instead.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Iterable

from .sir import (
    RESERVED_IDS,
    STYLE_ATTRIBUTES,
    ElementNotFound,
    Empty,
    Geometry,
    SlideDraft,
    TextBody,
    check_style_value,
    get_element,
    is_color,
)


class EditError(ValueError):
    pass


class ImmutableTarget(EditError):
    pass


class UnknownAlignmentType(EditError):
    pass


class DegenerateSize(EditError):
    pass


class UnknownAnchor(EditError):
    pass


class NotTextElement(EditError):
    pass


class IndexOutOfRange(EditError):
    pass


class UnknownAttribute(EditError):
    pass


class InvalidValue(EditError):
    pass


class UnknownProperty(EditError):
    pass


class MalformedColor(EditError):
    pass


class SameElement(EditError):
    pass


class NegativeSpace(EditError):
    pass


class MalformedCommand(EditError):
    pass


ALIGNMENT_TYPES = ("left", "right", "top", "bottom", "center_h", "center_v")
ANCHORS = {
    "center": (0.5, 0.5),
    "top_left": (0.0, 0.0),
    "top_right": (1.0, 0.0),
    "bottom_left": (0.0, 1.0),
    "bottom_right": (1.0, 1.0),
    "middle_left": (0.0, 0.5),
    "middle_right": (1.0, 0.5),
    "top_center": (0.5, 0.0),
    "bottom_center": (0.5, 1.0),
}
COLOR_PROPERTIES = {"fill": "fill_color", "text": "font_color", "border": "border_color"}
DIRECTIONS = ("horizontal", "vertical")


def _mutable(draft: SlideDraft, element_id: str):
    if element_id in RESERVED_IDS:
        raise ImmutableTarget(f"{element_id!r} is a read-only reference")
    return draft.elements[draft.index_of(element_id)]


def _finite(name: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise InvalidValue(f"{name} must be a finite number, got {value!r}")
    return float(value)


# ---------------------------------------------------------------- position and size


def move_element(draft: SlideDraft, id: str, dx: float, dy: float) -> SlideDraft:
    el = _mutable(draft, id)
    dx, dy = _finite("dx", dx), _finite("dy", dy)
    if dx == 0 and dy == 0:
        return draft
    g = el.geometry
    return draft.replace_element(replace(el, geometry=Geometry(g.x + dx, g.y + dy, g.w, g.h)))


def adjust_alignment(draft: SlideDraft, id: str, reference_id: str, alignment_type: str) -> SlideDraft:
    el = _mutable(draft, id)
    ref = get_element(draft, reference_id).geometry
    g = el.geometry
    if alignment_type == "left":
        dx, dy = ref.x - g.x, 0.0
    elif alignment_type == "right":
        dx, dy = ref.right - g.right, 0.0
    elif alignment_type == "center_h":
        dx, dy = ref.cx - g.cx, 0.0
    elif alignment_type == "top":
        dx, dy = 0.0, ref.y - g.y
    elif alignment_type == "bottom":
        dx, dy = 0.0, ref.bottom - g.bottom
    elif alignment_type == "center_v":
        dx, dy = 0.0, ref.cy - g.cy
    else:
        raise UnknownAlignmentType(f"unknown alignment type {alignment_type!r}")
    return move_element(draft, id, dx, dy)


def resize_element(draft: SlideDraft, id: str, dw: float, dh: float, anchor_point: str = "center") -> SlideDraft:
    el = _mutable(draft, id)
    dw, dh = _finite("dw", dw), _finite("dh", dh)
    if anchor_point not in ANCHORS:
        raise UnknownAnchor(f"unknown anchor point {anchor_point!r}")
    g = el.geometry
    w, h = g.w + dw, g.h + dh
    if not (w > 0 and h > 0):
        raise DegenerateSize(f"resize would give {id!r} size {w:g}x{h:g}")
    ax, ay = ANCHORS[anchor_point]
    return draft.replace_element(replace(el, geometry=Geometry(g.x - ax * dw, g.y - ay * dh, w, h)))


# ---------------------------------------------------------------- text content


def _text_body(draft: SlideDraft, id: str, index: Any):
    el = _mutable(draft, id)
    if not isinstance(el.content, TextBody):
        raise NotTextElement(f"{id!r} holds no bullet list")
    if isinstance(index, bool) or not isinstance(index, int):
        raise IndexOutOfRange(f"index must be an integer, got {index!r}")
    if not 0 <= index < len(el.content.bullets):
        raise IndexOutOfRange(f"index {index} outside 0..{len(el.content.bullets) - 1}")
    return el


def rewrite_bullet_point(draft: SlideDraft, id: str, index: int, new_text: str) -> SlideDraft:
    el = _text_body(draft, id, index)
    if not isinstance(new_text, str) or not new_text:
        raise InvalidValue("new_text must be a non-empty string")
    bullets = list(el.content.bullets)
    if bullets[index] == new_text:
        return draft
    bullets[index] = new_text
    return draft.replace_element(replace(el, content=TextBody(tuple(bullets))))


def delete_bullet_point(draft: SlideDraft, id: str, index: int) -> SlideDraft:
    el = _text_body(draft, id, index)
    bullets = el.content.bullets[:index] + el.content.bullets[index + 1 :]
    content = TextBody(bullets) if bullets else Empty()
    return draft.replace_element(replace(el, content=content))


# ---------------------------------------------------------------- style


def _check_style(attribute: str, value: Any) -> None:
    if attribute not in STYLE_ATTRIBUTES:
        raise UnknownAttribute(f"unsupported style attribute {attribute!r}")
    reason = check_style_value(attribute, value)
    if reason:
        raise InvalidValue(reason)


def change_style(draft: SlideDraft, id: str, attribute: str, value: Any) -> SlideDraft:
    el = _mutable(draft, id)
    _check_style(attribute, value)
    if isinstance(value, str) and attribute.endswith("_color"):
        value = value.upper()
    if getattr(el.style, attribute) == value:
        return draft
    return draft.replace_element(replace(el, style=replace(el.style, **{attribute: value})))


def recolor_element(draft: SlideDraft, id: str, property: str, color_value: str) -> SlideDraft:
    _mutable(draft, id)
    if property not in COLOR_PROPERTIES:
        raise UnknownProperty(f"unknown color property {property!r}")
    if not is_color(color_value):
        raise MalformedColor(f"{color_value!r} is not '#RRGGBB'")
    return change_style(draft, id, COLOR_PROPERTIES[property], color_value)


def reformat_text(draft: SlideDraft, id: str, style_params: dict[str, Any]) -> SlideDraft:
    """Several ``change_style`` calls, applied in sorted key order, all or nothing."""
    _mutable(draft, id)
    if not isinstance(style_params, dict):
        raise InvalidValue("style_params must be a mapping")
    keys = sorted(style_params)
    for key in keys:
        _check_style(key, style_params[key])
    for key in keys:
        draft = change_style(draft, id, key, style_params[key])
    return draft


# ---------------------------------------------------------------- spacing


def adjust_spacing(draft: SlideDraft, id1: str, id2: str, target_space: float, direction: str) -> SlideDraft:
    """Move the element whose leading edge comes later (ties: ``id2``) to make the gap exact."""
    if id1 == id2:
        raise SameElement("adjust_spacing needs two distinct elements")
    a, b = _mutable(draft, id1), _mutable(draft, id2)
    target_space = _finite("target_space", target_space)
    if target_space < 0:
        raise NegativeSpace("target_space must be >= 0")
    if direction not in DIRECTIONS:
        raise InvalidValue(f"direction must be one of {DIRECTIONS}")
    ga, gb = a.geometry, b.geometry
    if direction == "horizontal":
        first, later = (b, a) if ga.x > gb.x else (a, b)
        delta = first.geometry.right + target_space - later.geometry.x
        return move_element(draft, later.id, delta, 0.0)
    first, later = (b, a) if ga.y > gb.y else (a, b)
    delta = first.geometry.bottom + target_space - later.geometry.y
    return move_element(draft, later.id, 0.0, delta)


def spacing_mover(draft: SlideDraft, id1: str, id2: str, direction: str) -> str:
    """Id of the element :func:`adjust_spacing` would move."""
    ga, gb = get_element(draft, id1).geometry, get_element(draft, id2).geometry
    if direction == "horizontal":
        return id1 if ga.x > gb.x else id2
    return id1 if ga.y > gb.y else id2


# ---------------------------------------------------------------- commands

Number = (int, float)

# primitive -> (function, [(param, accepted types, required)])
PRIMITIVES: dict[str, tuple[Callable[..., SlideDraft], list[tuple[str, tuple, bool]]]] = {
    "move_element": (move_element, [("id", (str,), True), ("dx", Number, True), ("dy", Number, True)]),
    "adjust_alignment": (
        adjust_alignment,
        [("id", (str,), True), ("reference_id", (str,), True), ("alignment_type", (str,), True)],
    ),
    "resize_element": (
        resize_element,
        [("id", (str,), True), ("dw", Number, True), ("dh", Number, True), ("anchor_point", (str,), False)],
    ),
    "rewrite_bullet_point": (
        rewrite_bullet_point,
        [("id", (str,), True), ("index", (int,), True), ("new_text", (str,), True)],
    ),
    "delete_bullet_point": (delete_bullet_point, [("id", (str,), True), ("index", (int,), True)]),
    "change_style": (
        change_style,
        [("id", (str,), True), ("attribute", (str,), True), ("value", (object,), True)],
    ),
    "recolor_element": (
        recolor_element,
        [("id", (str,), True), ("property", (str,), True), ("color_value", (str,), True)],
    ),
    "reformat_text": (reformat_text, [("id", (str,), True), ("style_params", (dict,), True)]),
    "adjust_spacing": (
        adjust_spacing,
        [
            ("id1", (str,), True),
            ("id2", (str,), True),
            ("target_space", Number, True),
            ("direction", (str,), True),
        ],
    ),
}


@dataclass(frozen=True)
class EditCommand:
    primitive: str
    params: dict[str, Any] = field(default_factory=dict)

    def check(self) -> None:
        if self.primitive not in PRIMITIVES:
            raise MalformedCommand(f"unknown primitive {self.primitive!r}")
        if not isinstance(self.params, dict):
            raise MalformedCommand("params must be a mapping")
        _, signature = PRIMITIVES[self.primitive]
        names = {name for name, _, _ in signature}
        extra = set(self.params) - names
        if extra:
            raise MalformedCommand(f"{self.primitive}: unexpected parameters {sorted(extra)}")
        for name, types, required in signature:
            if name not in self.params:
                if required:
                    raise MalformedCommand(f"{self.primitive}: missing parameter {name!r}")
                continue
            value = self.params[name]
            if isinstance(value, bool) and types is not (object,):
                raise MalformedCommand(f"{self.primitive}: {name} has wrong type")
            if not isinstance(value, types):
                raise MalformedCommand(f"{self.primitive}: {name} has wrong type {type(value).__name__}")
            if types is Number and not math.isfinite(value):
                raise MalformedCommand(f"{self.primitive}: {name} must be finite")

    @property
    def target(self) -> str | None:
        return self.params.get("id", self.params.get("id1"))

    def to_dict(self) -> dict[str, Any]:
        return {"primitive": self.primitive, "params": self.params}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> EditCommand:
        if not isinstance(data, dict) or "primitive" not in data:
            raise MalformedCommand("command needs a 'primitive' field")
        return cls(data["primitive"], dict(data.get("params", {})))


def apply(draft: SlideDraft, cmd: EditCommand) -> SlideDraft:
    """Dispatch one command. The iteration counter is left alone."""
    cmd.check()
    func, _ = PRIMITIVES[cmd.primitive]
    return func(draft, **cmd.params)


def replay(draft: SlideDraft, commands: Iterable[EditCommand | dict]) -> SlideDraft:
    """Apply a recorded command log in order.

    Log records may carry an iteration number ``t``; the draft's counter is
    advanced to it, which lets a refinement log reproduce its final draft.
    """
    for entry in commands:
        if isinstance(entry, EditCommand):
            draft = apply(draft, entry)
            continue
        draft = apply(draft, EditCommand.from_dict(entry))
        t = entry.get("t")
        if isinstance(t, int) and t > draft.iteration:
            draft = draft.with_iteration(t)
    return draft


def write_command_log(path: str | Path, records: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def read_command_log(path: str | Path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


__all__ = [
    "ALIGNMENT_TYPES",
    "ANCHORS",
    "PRIMITIVES",
    "EditCommand",
    "EditError",
    "ElementNotFound",
    "adjust_alignment",
    "adjust_spacing",
    "apply",
    "change_style",
    "delete_bullet_point",
    "move_element",
    "recolor_element",
    "reformat_text",
    "replay",
    "resize_element",
    "rewrite_bullet_point",
]
