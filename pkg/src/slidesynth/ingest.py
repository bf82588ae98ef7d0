"""Markdown segmentation into content units and thematic clustering of units."""

from __future__ import annotations

import json
import re
from collections import Counter, deque
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from markdown_it import MarkdownIt

UNIT_TYPES = (
    "heading_1",
    "heading_2",
    "heading_3",
    "paragraph",
    "list_item",
    "image_description_placeholder",
    "table_summary_placeholder",
    "code_block",
    "blockquote",
)
PLACEHOLDER_TYPES = frozenset({"image_description_placeholder", "table_summary_placeholder"})
NOISE = -1

_CAPTION = re.compile(r"^Table:\s*(.*)$", re.S)


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class DocumentUnit:
    unit_id: str
    text_content: str
    unit_type: str
    concise_theme: str | None = None
    source_visual_id: str | None = None

    def __post_init__(self) -> None:
        if self.unit_type not in UNIT_TYPES:
            raise ValueError(f"unknown unit type {self.unit_type!r}")
        if (self.source_visual_id is not None) != (self.unit_type in PLACEHOLDER_TYPES):
            raise ValueError("source_visual_id is set exactly for placeholder units")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> DocumentUnit:
        return cls(
            data["unit_id"], data["text_content"], data["unit_type"], data.get("concise_theme"), data.get("source_visual_id")
        )


class _Builder:
    def __init__(self, lines: list[str]) -> None:
        self.lines = lines
        self.units: list[DocumentUnit] = []
        self.visuals: dict[str, dict] = {}
        self.n_img = 0
        self.n_table = 0

    def add(self, text: str, unit_type: str, visual_id: str | None = None) -> int:
        self.units.append(DocumentUnit(f"doc_unit_{len(self.units) + 1:03d}", text, unit_type, None, visual_id))
        return len(self.units) - 1

    def extend(self, index: int, text: str) -> None:
        u = self.units[index]
        self.units[index] = DocumentUnit(u.unit_id, f"{u.text_content} {text}".strip(), u.unit_type, None, u.source_visual_id)

    def image(self, src: str, alt: str) -> None:
        self.n_img += 1
        vid = f"doc_img_{self.n_img:03d}"
        self.visuals[vid] = {"path": src, "descriptive_text": alt}
        self.add(f"[IMAGE_DESCRIPTION: {vid}: {alt}]", "image_description_placeholder", vid)

    def table(self, line_map, caption: str | None, header: list[str]) -> None:
        self.n_table += 1
        vid = f"doc_table_{self.n_table:03d}"
        source = "\n".join(self.lines[line_map[0] : line_map[1]]) if line_map else ""
        described = caption if caption else " | ".join(header)
        self.visuals[vid] = {
            "inline_table": source,
            "descriptive_text": described,
            "summary_source": "caption" if caption else "header_row",
        }
        self.add(f"[TABLE_SUMMARY: {vid}: {described}]", "table_summary_placeholder", vid)


def _inline_pieces(inline) -> list[tuple[str, str, str]]:
    """Split inline children into ('text', s, '') runs and ('image', src, alt) items."""
    pieces: list[tuple[str, str, str]] = []
    buf: list[str] = []

    def flush() -> None:
        text = " ".join("".join(buf).split())
        if text:
            pieces.append(("text", text, ""))
        buf.clear()

    for child in inline.children or []:
        if child.type == "image":
            flush()
            pieces.append(("image", child.attrs.get("src", ""), child.content))
        elif child.type in ("text", "code_inline", "html_inline"):
            buf.append(child.content)
        elif child.type in ("softbreak", "hardbreak"):
            buf.append(" ")
    flush()
    return pieces


def parse_markdown(doc: str) -> tuple[list[DocumentUnit], dict[str, dict]]:
    """Segment a Markdown document into units, substituting visual placeholders.

    Returns the units in document order and the visual map keyed by
    placeholder id. Table summaries use the ``Table: <caption>`` line that
    directly precedes a pipe table, or the header row when there is none.
    """
    md = MarkdownIt("commonmark").enable("table")
    tokens = md.parse(doc)
    b = _Builder(doc.splitlines())

    pending_caption: str | None = None
    heading: str | None = None
    item_stack: list[int | None] = []
    quote_depth = 0
    quote_unit: int | None = None
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        t = tok.type
        if t == "heading_open":
            level = min(int(tok.tag[1]), 3)
            heading = f"heading_{level}"
        elif t == "heading_close":
            heading = None
        elif t == "list_item_open":
            item_stack.append(None)
        elif t == "list_item_close":
            item_stack.pop()
        elif t == "blockquote_open":
            if quote_depth == 0:
                quote_unit = None
            quote_depth += 1
        elif t == "blockquote_close":
            quote_depth -= 1
        elif t in ("fence", "code_block"):
            code = tok.content.rstrip("\n")
            if code:
                b.add(code, "code_block")
        elif t == "table_open":
            header, j = [], i + 1
            while tokens[j].type != "table_close":
                if tokens[j].type == "inline" and tokens[j - 1].type == "th_open":
                    header.append(" ".join(tokens[j].content.split()))
                j += 1
            b.table(tok.map, pending_caption, header)
            pending_caption = None
            i = j
        elif t == "inline":
            pieces = _inline_pieces(tok)
            text = " ".join(p[1] for p in pieces if p[0] == "text")
            is_caption = (
                heading is None
                and not item_stack
                and quote_depth == 0
                and len(pieces) == 1
                and pieces[0][0] == "text"
                and _CAPTION.match(text)
                and i + 2 < len(tokens)
                and tokens[i + 2].type == "table_open"
            )
            if is_caption:
                pending_caption = _CAPTION.match(text).group(1).strip()
            elif heading is not None:
                if text:
                    b.add(text, heading)
            elif quote_depth:
                if text:
                    if quote_unit is None:
                        quote_unit = b.add(text, "blockquote")
                    else:
                        b.extend(quote_unit, text)
                for kind, src, alt in pieces:
                    if kind == "image":
                        b.image(src, alt)
            else:
                for kind, val, alt in pieces:
                    if kind == "image":
                        b.image(val, alt)
                    elif item_stack:
                        if item_stack[-1] is None:
                            item_stack[-1] = b.add(val, "list_item")
                        else:
                            b.extend(item_stack[-1], val)
                    else:
                        b.add(val, "paragraph")
        i += 1
    return b.units, b.visuals


# ---------------------------------------------------------------- clustering


@dataclass(frozen=True)
class ClusterConfig:
    max_units_threshold: int = 200
    min_pts: int = 2
    eps: float | None = None

    def __post_init__(self) -> None:
        if self.max_units_threshold <= 0:
            raise ValueError("max_units_threshold must be positive")
        if self.min_pts < 1:
            raise ValueError("min_pts must be >= 1")


def eps_schedule(num_units: int, threshold: int = 200) -> float:
    if num_units < 0:
        raise ValueError("num_units must be >= 0")
    return min(0.2 + 0.2 * (num_units / threshold), 0.4)


def cosine_distances(vectors: np.ndarray) -> np.ndarray:
    """Pairwise ``1 - cos``; a zero vector is at distance 1 from everything but itself."""
    norms = np.linalg.norm(vectors, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    unit = vectors / safe[:, None]
    d = 1.0 - unit @ unit.T
    zero = norms == 0
    d[zero, :] = 1.0
    d[:, zero] = 1.0
    np.fill_diagonal(d, 0.0)
    return np.clip(d, 0.0, 2.0)


def dbscan_cluster(vectors: Sequence[Sequence[float]], config: ClusterConfig = ClusterConfig()) -> list[int]:
    """DBSCAN on cosine distance. Clusters are numbered in order of discovery."""
    if len(vectors) == 0:
        return []
    dims = {len(v) for v in vectors}
    if len(dims) != 1:
        raise DimensionMismatch(f"vectors have differing dimensions {sorted(dims)}")
    x = np.asarray(vectors, dtype=np.float64)
    n = len(x)
    eps = config.eps if config.eps is not None else eps_schedule(n, config.max_units_threshold)
    dist = cosine_distances(x)
    neighbors = [np.flatnonzero(dist[i] <= eps) for i in range(n)]
    core = np.array([len(nb) >= config.min_pts for nb in neighbors])

    labels = [None] * n
    cluster = 0
    for i in range(n):
        if labels[i] is not None:
            continue
        if not core[i]:
            labels[i] = NOISE
            continue
        labels[i] = cluster
        queue = deque(neighbors[i])
        while queue:
            q = int(queue.popleft())
            if labels[q] == NOISE:
                labels[q] = cluster
            if labels[q] is not None:
                continue
            labels[q] = cluster
            if core[q]:
                queue.extend(neighbors[q])
        cluster += 1
    return labels


def representative_theme(units: Sequence[DocumentUnit]) -> str:
    if not units:
        raise ValueError("cluster must be non-empty")
    themes = Counter(u.concise_theme for u in units if u.concise_theme)
    if themes:
        best = max(themes.values())
        return min(t for t, c in themes.items() if c == best)
    return " ".join(units[0].text_content.split()[:5])


def group_clusters(units: Sequence[DocumentUnit], labels: Sequence[int]) -> dict[int, list[DocumentUnit]]:
    groups: dict[int, list[DocumentUnit]] = {}
    for u, lab in zip(units, labels):
        groups.setdefault(lab, []).append(u)
    return groups


# ---------------------------------------------------------------- I/O


def write_units(path: str | Path, units: Sequence[DocumentUnit]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for u in units:
            fh.write(json.dumps(u.to_dict(), ensure_ascii=False) + "\n")


def read_units(path: str | Path) -> list[DocumentUnit]:
    with open(path, encoding="utf-8") as fh:
        return [DocumentUnit.from_dict(json.loads(line)) for line in fh if line.strip()]


def write_visual_map(path: str | Path, visuals: dict[str, dict]) -> None:
    Path(path).write_text(json.dumps(visuals, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
