"""Structured critiques of a slide draft.

The visual critic is a deterministic geometric stand-in for a vision-model
critic; the logic critic is a rule-based stub. Any callable with the
:class:`Critic` signature can replace either one.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any, Protocol

from .concepts import SlideConcept
from .render import METRICS, TextMetrics, required_height
from .sir import CANVAS_HEIGHT, CANVAS_WIDTH, SLIDE_BOUNDS, Geometry, SlideDraft, TextBody

OVERLAP = "Overlap"
MISALIGNMENT = "Misalignment"
OVERFLOW = "Overflow"
OUT_OF_BOUNDS = "OutOfBounds"
SPACING_VIOLATION = "SpacingViolation"
VERBOSE_BULLET = "verbose_bullet"
DUPLICATE_CONTENT = "duplicate_content"

VISUAL_ISSUE_TYPES = (OVERLAP, MISALIGNMENT, OVERFLOW, OUT_OF_BOUNDS, SPACING_VIOLATION)
LOGIC_ISSUE_TYPES = (VERBOSE_BULLET, DUPLICATE_CONTENT)

OVERFLOW_SUGGESTION = "Reduce font size or content length"
VERBOSE_WORD_LIMIT = 30
VERBOSE_SEVERITY = 0.4
DUPLICATE_SEVERITY = 0.6

CANVAS = Geometry(0, 0, CANVAS_WIDTH, CANVAS_HEIGHT)


@dataclass(frozen=True)
class CriticThresholds:
    overlap_min_area_px2: float = 64.0
    align_tolerance_px: float = 4.0
    guide_snap_px: float = 8.0
    spacing_min_px: float = 12.0

    def __post_init__(self) -> None:
        if min(self.overlap_min_area_px2, self.align_tolerance_px, self.guide_snap_px, self.spacing_min_px) <= 0:
            raise ValueError("critic thresholds must be positive")
        if self.guide_snap_px <= self.align_tolerance_px:
            raise ValueError("guide_snap_px must exceed align_tolerance_px")


@dataclass(frozen=True)
class CritiqueIssue:
    element_id: str
    issue_type: str
    severity: float
    target_element_id: str | None = None
    suggestion: str = ""

    def __post_init__(self) -> None:
        if not 0.0 <= self.severity <= 1.0:
            raise ValueError(f"severity {self.severity} outside [0, 1]")

    @property
    def key(self) -> tuple[str, str, str | None]:
        return (self.element_id, self.issue_type, self.target_element_id)

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {
            "element_id": self.element_id,
            "issue_type": self.issue_type,
            "severity": self.severity,
        }
        if self.target_element_id is not None:
            d["target_element_id"] = self.target_element_id
        d["suggestion"] = self.suggestion
        return d

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> CritiqueIssue:
        return cls(
            data["element_id"],
            data["issue_type"],
            float(data["severity"]),
            data.get("target_element_id"),
            data.get("suggestion", ""),
        )


def _issue_order(issue: CritiqueIssue):
    return (-issue.severity, issue.element_id, issue.issue_type, issue.target_element_id or "", issue.suggestion)


@dataclass(frozen=True)
class CritiqueList:
    issues: tuple[CritiqueIssue, ...] = ()
    draft_iteration: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "issues", tuple(sorted(self.issues, key=_issue_order)))

    def __len__(self) -> int:
        return len(self.issues)

    def __iter__(self):
        return iter(self.issues)

    def merged(self, other: CritiqueList) -> CritiqueList:
        return CritiqueList(self.issues + other.issues, self.draft_iteration)

    def to_dict(self) -> dict[str, Any]:
        return {"issues": [i.to_dict() for i in self.issues]}

    def to_json(self) -> bytes:
        return (json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n").encode("utf-8")

    @classmethod
    def from_json(cls, raw: bytes | str, draft_iteration: int = 0) -> CritiqueList:
        data = json.loads(raw)
        return cls(tuple(CritiqueIssue.from_dict(d) for d in data["issues"]), draft_iteration)


class Critic(Protocol):
    def __call__(self, draft: SlideDraft, concept: SlideConcept | None = None) -> CritiqueList: ...


# ---------------------------------------------------------------- detectors


def detect_overlap(draft: SlideDraft, thresholds: CriticThresholds = CriticThresholds()) -> list[CritiqueIssue]:
    """One issue per overlapping pair, reported on the element drawn on top."""
    issues = []
    els = draft.elements
    for i in range(len(els)):
        for j in range(i + 1, len(els)):
            a, b = els[i], els[j]
            inter = a.geometry.intersection_area(b.geometry)
            if inter <= thresholds.overlap_min_area_px2:
                continue
            severity = min(1.0, inter / min(a.geometry.area, b.geometry.area))
            top, under = (b, a) if (b.z_order, j) >= (a.z_order, i) else (a, b)
            issues.append(
                CritiqueIssue(top.id, OVERLAP, severity, under.id, f"Separate {top.id} from {under.id}")
            )
    return issues


# (geometry accessor, alignment type) per axis; x-guides first.
_X_GUIDES = (("x", "left"), ("right", "right"), ("cx", "center_h"))
_Y_GUIDES = (("y", "top"), ("bottom", "bottom"), ("cy", "center_v"))

_ALIGN_PHRASE = {
    "left": "Align the left edge of {el} with {ref}",
    "right": "Align the right edge of {el} with {ref}",
    "top": "Align the top edge of {el} with {ref}",
    "bottom": "Align the bottom edge of {el} with {ref}",
    "center_h": "Align the horizontal center of {el} with {ref}",
    "center_v": "Align the vertical center of {el} with {ref}",
}
_CENTER_ON_SLIDE = "Center the {el} horizontally"
_ALIGN_PATTERNS = [
    (re.compile(r"^Center the (?P<el>\S+) horizontally$"), "center_h"),
    *[
        (re.compile("^" + re.escape(p).replace(r"\{el\}", r"(?P<el>\S+)").replace(r"\{ref\}", r"(?P<ref>\S+)") + "$"), kind)
        for kind, p in _ALIGN_PHRASE.items()
    ],
]


def alignment_from_suggestion(suggestion: str) -> str | None:
    """Recover the alignment type encoded in a misalignment suggestion."""
    for pattern, kind in _ALIGN_PATTERNS:
        if pattern.match(suggestion):
            return kind
    return None


def _band(g: Geometry) -> str:
    cy = g.cy
    return "top" if cy < 130 else "bottom" if cy >= 640 else "middle"


def _column(g: Geometry) -> str:
    cx = g.cx
    return "left" if cx < 616 else "right" if cx > 664 else "center"


def _misalign_severity(d: float, t: CriticThresholds) -> float:
    return min(1.0, 0.5 + 0.5 * (d - t.align_tolerance_px) / (t.guide_snap_px - t.align_tolerance_px))


def _near_miss(a: Geometry, b: Geometry, guides, t: CriticThresholds) -> tuple[float, str] | None:
    """Closest near-miss guide, or None when any guide already lines up."""
    best = None
    for attr, kind in guides:
        d = abs(getattr(a, attr) - getattr(b, attr))
        if d <= t.align_tolerance_px:
            return None
        if d <= t.guide_snap_px and (best is None or d < best[0]):
            best = (d, kind)
    return best


def detect_misalignment(draft: SlideDraft, thresholds: CriticThresholds = CriticThresholds()) -> list[CritiqueIssue]:
    """Near-miss alignments: edges/centres closer than the snap distance but not aligned.

    Each element is also checked against the slide's horizontal centre line.
    Pairs are compared on x-guides when they share a column and on y-guides
    when they share a band; the issue goes on the later-declared element.
    """
    t = thresholds
    issues = []
    els = draft.elements
    for el in els:
        d = abs(el.geometry.cx - CANVAS_WIDTH / 2)
        if t.align_tolerance_px < d <= t.guide_snap_px:
            issues.append(
                CritiqueIssue(el.id, MISALIGNMENT, _misalign_severity(d, t), SLIDE_BOUNDS, _CENTER_ON_SLIDE.format(el=el.id))
            )
    for i in range(len(els)):
        for j in range(i + 1, len(els)):
            ref, el = els[i], els[j]
            ga, gb = ref.geometry, el.geometry
            checks = []
            if _column(ga) == _column(gb):
                checks.append(_X_GUIDES)
            if _band(ga) == _band(gb):
                checks.append(_Y_GUIDES)
            for guides in checks:
                miss = _near_miss(gb, ga, guides, t)
                if miss is None:
                    continue
                d, kind = miss
                issues.append(
                    CritiqueIssue(
                        el.id, MISALIGNMENT, _misalign_severity(d, t), ref.id, _ALIGN_PHRASE[kind].format(el=el.id, ref=ref.id)
                    )
                )
    return issues


def detect_overflow(draft: SlideDraft, metrics: TextMetrics = METRICS) -> list[CritiqueIssue]:
    issues = []
    for el in draft.elements:
        need = required_height(el, metrics)
        h = el.geometry.h
        if need > h:
            severity = min(1.0, (need - h) / h)
            issues.append(CritiqueIssue(el.id, OVERFLOW, severity, None, OVERFLOW_SUGGESTION))
    return issues


def detect_out_of_bounds(draft: SlideDraft) -> list[CritiqueIssue]:
    issues = []
    for el in draft.elements:
        g = el.geometry
        if CANVAS.contains(g):
            continue
        outside = g.area - g.intersection_area(CANVAS)
        if outside > 0:
            issues.append(
                CritiqueIssue(el.id, OUT_OF_BOUNDS, min(1.0, outside / g.area), SLIDE_BOUNDS, f"Move {el.id} inside the slide")
            )
    return issues


def gap(a: Geometry, b: Geometry, direction: str) -> float:
    """Signed gap between boxes along an axis (negative when they overlap on it)."""
    if direction == "horizontal":
        first, second = (a, b) if a.x <= b.x else (b, a)
        return second.x - first.right
    first, second = (a, b) if a.y <= b.y else (b, a)
    return second.y - first.bottom


def detect_spacing(draft: SlideDraft, thresholds: CriticThresholds = CriticThresholds()) -> list[CritiqueIssue]:
    """Pairs of boxes closer than ``spacing_min_px`` without overlapping.

    Not part of the default visual critic; pass it via ``extra_detectors``.
    """
    issues = []
    m = thresholds.spacing_min_px
    els = draft.elements
    for i in range(len(els)):
        for j in range(i + 1, len(els)):
            a, b = els[i].geometry, els[j].geometry
            gx, gy = gap(a, b, "horizontal"), gap(a, b, "vertical")
            # separated along exactly the axis with the non-negative gap
            g = gx if gx >= 0 and gy < 0 else gy if gy >= 0 and gx < 0 else None
            if g is not None and g < m:
                issues.append(
                    CritiqueIssue(
                        els[j].id, SPACING_VIOLATION, min(1.0, (m - g) / m), els[i].id, f"Increase the space between {els[i].id} and {els[j].id}"
                    )
                )
    return issues


def visual_critic(
    draft: SlideDraft,
    thresholds: CriticThresholds = CriticThresholds(),
    metrics: TextMetrics = METRICS,
    extra_detectors=(),
) -> CritiqueList:
    issues = (
        detect_overlap(draft, thresholds)
        + detect_misalignment(draft, thresholds)
        + detect_overflow(draft, metrics)
        + detect_out_of_bounds(draft)
    )
    for detector in extra_detectors:
        issues += detector(draft, thresholds)
    return CritiqueList(tuple(issues), draft.iteration)


_BULLET_INDEX = re.compile(r"bullet (\d+)")


def bullet_index_from_suggestion(suggestion: str) -> int | None:
    m = _BULLET_INDEX.search(suggestion)
    return int(m.group(1)) if m else None


def logic_critic_stub(draft: SlideDraft, concept: SlideConcept | None = None) -> CritiqueList:
    """Rule-based text checks: over-long bullets and verbatim duplicates."""
    issues = []
    seen: set[str] = set()
    for el in draft.elements:
        if not isinstance(el.content, TextBody):
            continue
        for idx, bullet in enumerate(el.content.bullets):
            if len(bullet.split()) > VERBOSE_WORD_LIMIT:
                issues.append(
                    CritiqueIssue(el.id, VERBOSE_BULLET, VERBOSE_SEVERITY, None, f"Shorten bullet {idx} of {el.id}")
                )
            norm = bullet.strip()
            if norm in seen:
                issues.append(
                    CritiqueIssue(el.id, DUPLICATE_CONTENT, DUPLICATE_SEVERITY, None, f"Remove duplicate bullet {idx} of {el.id}")
                )
            seen.add(norm)
    return CritiqueList(tuple(issues), draft.iteration)


def critique(draft: SlideDraft, concept: SlideConcept | None = None, thresholds: CriticThresholds = CriticThresholds()) -> CritiqueList:
    """Visual and logic critiques merged into one list."""
    return visual_critic(draft, thresholds).merged(logic_critic_stub(draft, concept))
