"""Deterministic SVG rendering and the monospace text-metrics model.

The overflow critic measures text with exactly the functions used here to lay
it out, so "no overflow issue" and "renders inside its box" coincide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape, quoteattr

from .sir import CANVAS_HEIGHT, CANVAS_WIDTH, Image, SlideDraft, SlideElement, TextBody, text_lines


@dataclass(frozen=True)
class TextMetrics:
    char_width_factor: float = 0.6
    line_height_factor: float = 1.3
    bullet_marker_indent: float = 1.2  # em

    def __post_init__(self) -> None:
        if min(self.char_width_factor, self.line_height_factor, self.bullet_marker_indent) <= 0:
            raise ValueError("text metric factors must be positive")


METRICS = TextMetrics()


def chars_per_line(font_size: float, box_width: float, metrics: TextMetrics = METRICS) -> int:
    return max(1, math.floor(box_width / (metrics.char_width_factor * font_size) + 1e-9))


def wrap_text(text: str, font_size: float, box_width: float, metrics: TextMetrics = METRICS) -> list[str]:
    """Greedy word wrap; a word longer than a line sits alone on its own line."""
    limit = chars_per_line(font_size, box_width, metrics)
    lines: list[str] = []
    current = ""
    for word in text.split():
        if not current:
            current = word
        elif len(current) + 1 + len(word) <= limit:
            current += " " + word
        else:
            lines.append(current)
            current = word
    if current:
        lines.append(current)
    return lines


def measure_text(text: str, font_size: float, box_width: float, metrics: TextMetrics = METRICS) -> float:
    """Height in px needed to lay ``text`` out at ``font_size`` within ``box_width``."""
    if box_width <= 0:
        raise ValueError("box_width must be positive")
    n = len(wrap_text(text, font_size, box_width, metrics))
    return n * metrics.line_height_factor * font_size


def text_width(element: SlideElement, metrics: TextMetrics = METRICS) -> float:
    """Width available to wrapped text: bullets lose the marker indent."""
    w = element.geometry.w
    if isinstance(element.content, TextBody):
        w -= metrics.bullet_marker_indent * element.style.font_size
    return w


def required_height(element: SlideElement, metrics: TextMetrics = METRICS) -> float:
    """Total height of all text in the element under the metrics model (0 when no text)."""
    pieces = text_lines(element.content)
    if not pieces:
        return 0.0
    width = text_width(element, metrics)
    if width <= 0:
        return math.inf
    return sum(measure_text(p, element.style.font_size, width, metrics) for p in pieces)


# ---------------------------------------------------------------- SVG

BACKGROUND = "#FFFFFF"
PLACEHOLDER_FILL = "#D9D9D9"
PLACEHOLDER_STROKE = "#8C8C8C"


def _num(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(round(v, 3))


def _attrs(**kw) -> str:
    return " ".join(f'{k.rstrip("_").replace("_", "-")}={quoteattr(str(v))}' for k, v in kw.items())


def _render_text(el: SlideElement, metrics: TextMetrics) -> list[str]:
    st, g = el.style, el.geometry
    fs = st.font_size
    line_h = metrics.line_height_factor * fs
    indent = metrics.bullet_marker_indent * fs if isinstance(el.content, TextBody) else 0.0
    width = text_width(el, metrics)
    if width <= 0:
        return []
    if st.text_alignment == "center":
        anchor, tx = "middle", g.x + indent + width / 2
    elif st.text_alignment == "right":
        anchor, tx = "end", g.right
    else:
        anchor, tx = "start", g.x + indent
    out = []
    y = g.y
    common = dict(font_family="monospace", font_size=_num(fs), fill=st.font_color)
    if st.font_weight == "bold":
        common["font_weight"] = "bold"
    for piece in text_lines(el.content):
        lines = wrap_text(piece, fs, width, metrics)
        if indent and lines:
            out.append(
                f"<text {_attrs(x=_num(g.x), y=_num(y + line_h - 0.3 * fs), **common)}>&#8226;</text>"
            )
        for line in lines:
            y += line_h
            out.append(
                f"<text {_attrs(x=_num(tx), y=_num(y - 0.3 * fs), text_anchor=anchor, **common)}>{escape(line)}</text>"
            )
    return out


def render_element(el: SlideElement, metrics: TextMetrics = METRICS) -> str:
    g, st = el.geometry, el.style
    parts = [f"<g {_attrs(id=el.id, opacity=_num(st.opacity))}>"]
    box = dict(x=_num(g.x), y=_num(g.y), width=_num(g.w), height=_num(g.h))
    if isinstance(el.content, Image):
        parts.append(f"<rect {_attrs(**box, fill=PLACEHOLDER_FILL, stroke=PLACEHOLDER_STROKE)}/>")
        label = dict(x=_num(g.cx), y=_num(g.cy), text_anchor="middle", font_family="monospace", font_size="14")
        parts.append(f"<text {_attrs(**label, fill='#404040')}>{escape(el.content.visual_id)}</text>")
    elif st.fill_color or (st.border_color and st.border_width > 0):
        paint = {"fill": st.fill_color or "none"}
        if st.border_color and st.border_width > 0:
            paint.update(stroke=st.border_color, stroke_width=_num(st.border_width))
        parts.append(f"<rect {_attrs(**box, **paint)}/>")
    parts.extend(_render_text(el, metrics))
    parts.append("</g>")
    return "\n".join(parts)


def render_svg(draft: SlideDraft, metrics: TextMetrics = METRICS) -> bytes:
    """SVG for one slide; elements drawn by z_order, then declaration order."""
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(CANVAS_WIDTH)}" height="{_num(CANVAS_HEIGHT)}" '
        f'viewBox="0 0 {_num(CANVAS_WIDTH)} {_num(CANVAS_HEIGHT)}">'
    )
    body = [f'<rect x="0" y="0" width="{_num(CANVAS_WIDTH)}" height="{_num(CANVAS_HEIGHT)}" fill="{BACKGROUND}"/>']
    ordered = sorted(enumerate(draft.elements), key=lambda p: (p[1].z_order, p[0]))
    body.extend(render_element(el, metrics) for _, el in ordered)
    return ("\n".join([head, *body, "</svg>"]) + "\n").encode("utf-8")


def render_index_html(slide_files: list[str], title: str = "Deck") -> bytes:
    """A minimal page listing slide SVGs in order."""
    items = "\n".join(
        f'<li><img src={quoteattr(name)} width="640" height="360" alt={quoteattr(name)}/></li>' for name in slide_files
    )
    html = (
        "<!DOCTYPE html>\n<html>\n<head><meta charset=\"utf-8\"><title>"
        f"{escape(title)}</title></head>\n<body>\n<ol>\n{items}\n</ol>\n</body>\n</html>\n"
    )
    return html.encode("utf-8")
