"""Iterative critique-and-repair refinement of a single slide draft."""

from __future__ import annotations

import csv
import logging
import math
import random
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .concepts import SlideConcept
from .critics import (
    DUPLICATE_CONTENT,
    MISALIGNMENT,
    OUT_OF_BOUNDS,
    OVERFLOW,
    OVERLAP,
    SPACING_VIOLATION,
    CriticThresholds,
    CritiqueIssue,
    CritiqueList,
    alignment_from_suggestion,
    bullet_index_from_suggestion,
    critique,
    gap,
)
from .edits import EditCommand, EditError, apply, spacing_mover
from .render import METRICS, required_height
from .sir import CANVAS_HEIGHT, CANVAS_WIDTH, RESERVED_IDS, SirError, SlideDraft, TextBody, get_element

log = logging.getLogger(__name__)

IssueKey = tuple
MIN_FONT_SIZE = 6.0
FONT_SHRINK = 0.9


@dataclass(frozen=True)
class RefinementConfig:
    severity_threshold: float = 0.2
    max_iterations: int = 5
    time_budget_s: float = 30.0
    escalation_factor: float = 1.5
    accept_only_improving: bool = True
    thresholds: CriticThresholds = field(default_factory=CriticThresholds)

    def __post_init__(self) -> None:
        if not 0.0 < self.severity_threshold < 1.0:
            raise ValueError("severity_threshold must lie in (0, 1)")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if self.escalation_factor < 1.0:
            raise ValueError("escalation_factor must be >= 1")
        if self.time_budget_s <= 0:
            raise ValueError("time_budget_s must be positive")


@dataclass(frozen=True)
class TraceRecord:
    t: int
    aggregate_severity: float
    issues_count: int
    commands_applied: int
    elapsed_ms: float


@dataclass
class RefinementResult:
    draft: SlideDraft
    trace: list[TraceRecord]
    commands: list[dict]
    critiques: list[CritiqueList]
    weights: dict[IssueKey, float]
    skipped: list[str] = field(default_factory=list)

    @property
    def final_critique(self) -> CritiqueList:
        return self.critiques[-1]


def aggregate_severity(issues: Iterable[CritiqueIssue], weights: dict[IssueKey, float] | None = None) -> float:
    weights = weights or {}
    return sum(weights.get(i.key, 1.0) * i.severity for i in issues)


def weighted_max(issues: Iterable[CritiqueIssue], weights: dict[IssueKey, float] | None = None) -> float:
    weights = weights or {}
    return max((weights.get(i.key, 1.0) * i.severity for i in issues), default=0.0)


# ---------------------------------------------------------------- planning


def _mutable(eid: str | None) -> bool:
    return eid is not None and eid not in RESERVED_IDS


def _plan_overflow(draft: SlideDraft, issue: CritiqueIssue) -> list[EditCommand]:
    el = get_element(draft, issue.element_id)
    fs = el.style.font_size
    new_fs = max(MIN_FONT_SIZE, FONT_SHRINK * fs)
    cmds = []
    if new_fs < fs:
        cmds.append(EditCommand("change_style", {"id": el.id, "attribute": "font_size", "value": new_fs}))
    shrunk = replace(el, style=replace(el.style, font_size=new_fs))
    if required_height(shrunk, METRICS) > el.geometry.h and isinstance(el.content, TextBody) and len(el.content.bullets) > 1:
        cmds.append(EditCommand("delete_bullet_point", {"id": el.id, "index": len(el.content.bullets) - 1}))
    return cmds


def _plan_overlap(draft: SlideDraft, issue: CritiqueIssue, spacing: float) -> list[EditCommand]:
    top = get_element(draft, issue.element_id).geometry
    under = get_element(draft, issue.target_element_id).geometry
    # motion needed to open a gap of `spacing` along each axis
    motion = {d: spacing - gap(top, under, d) for d in ("horizontal", "vertical")}
    direction = min(motion, key=lambda d: (motion[d], d))
    return [
        EditCommand(
            "adjust_spacing",
            {"id1": issue.target_element_id, "id2": issue.element_id, "target_space": spacing, "direction": direction},
        )
    ]


def _plan_out_of_bounds(draft: SlideDraft, issue: CritiqueIssue) -> list[EditCommand]:
    g = get_element(draft, issue.element_id).geometry

    def shift(lo: float, hi: float, limit: float) -> float:
        if lo < 0:
            return -lo
        if hi > limit:
            return max(limit - hi, -lo)
        return 0.0

    dx, dy = shift(g.x, g.right, CANVAS_WIDTH), shift(g.y, g.bottom, CANVAS_HEIGHT)
    if dx == 0 and dy == 0:
        return []
    return [EditCommand("move_element", {"id": issue.element_id, "dx": dx, "dy": dy})]


def _plan_spacing(draft: SlideDraft, issue: CritiqueIssue, spacing: float) -> list[EditCommand]:
    a = get_element(draft, issue.target_element_id).geometry
    b = get_element(draft, issue.element_id).geometry
    direction = "horizontal" if gap(a, b, "horizontal") >= 0 else "vertical"
    return [
        EditCommand(
            "adjust_spacing",
            {"id1": issue.target_element_id, "id2": issue.element_id, "target_space": spacing, "direction": direction},
        )
    ]


def plan_issue(draft: SlideDraft, issue: CritiqueIssue, thresholds: CriticThresholds = CriticThresholds()) -> list[EditCommand]:
    """Rulebook mapping one issue to zero or more commands on the same element."""
    kind = issue.issue_type
    if kind == OVERFLOW:
        return _plan_overflow(draft, issue)
    if kind == MISALIGNMENT:
        alignment = alignment_from_suggestion(issue.suggestion)
        if alignment is None or issue.target_element_id is None:
            return []
        return [
            EditCommand(
                "adjust_alignment",
                {"id": issue.element_id, "reference_id": issue.target_element_id, "alignment_type": alignment},
            )
        ]
    if kind == OVERLAP and _mutable(issue.target_element_id):
        return _plan_overlap(draft, issue, thresholds.spacing_min_px)
    if kind == OUT_OF_BOUNDS:
        return _plan_out_of_bounds(draft, issue)
    if kind == SPACING_VIOLATION and _mutable(issue.target_element_id):
        return _plan_spacing(draft, issue, thresholds.spacing_min_px)
    if kind == DUPLICATE_CONTENT:
        idx = bullet_index_from_suggestion(issue.suggestion)
        if idx is not None:
            return [EditCommand("delete_bullet_point", {"id": issue.element_id, "index": idx})]
    # verbose bullets need a rewriting agent; nothing to do deterministically
    return []


def _moved_element(draft: SlideDraft, cmd: EditCommand) -> str | None:
    if cmd.primitive == "adjust_spacing":
        p = cmd.params
        try:
            return spacing_mover(draft, p["id1"], p["id2"], p["direction"])
        except SirError:
            return None
    return cmd.target


def plan_edits(
    critique_list: CritiqueList | Sequence[CritiqueIssue],
    draft: SlideDraft,
    weights: dict[IssueKey, float] | None = None,
    thresholds: CriticThresholds = CriticThresholds(),
    skipped: list[str] | None = None,
) -> list[EditCommand]:
    """Commands for the highest-priority issue on each element, in priority order."""
    weights = weights or {}
    issues = sorted(
        critique_list,
        key=lambda i: (-weights.get(i.key, 1.0) * i.severity, i.element_id, i.issue_type, i.target_element_id or ""),
    )
    touched: set[str] = set()
    plan: list[EditCommand] = []
    for issue in issues:
        if issue.element_id in touched:
            continue
        try:
            cmds = plan_issue(draft, issue, thresholds)
        except SirError as exc:
            cmds = []
            log.debug("cannot plan %s: %s", issue.key, exc)
        if not cmds:
            if skipped is not None:
                skipped.append(f"{issue.element_id}:{issue.issue_type}")
            continue
        movers = {_moved_element(draft, c) for c in cmds}
        if movers & touched:
            continue
        touched.add(issue.element_id)
        touched.update(m for m in movers if m)
        plan.extend(cmds)
    return plan


# ---------------------------------------------------------------- loop

CriticFn = Callable[[SlideDraft, "SlideConcept | None"], CritiqueList]


def refine(
    draft: SlideDraft,
    concept: SlideConcept | None = None,
    config: RefinementConfig = RefinementConfig(),
    critic: CriticFn | None = None,
    clock: Callable[[], float] = time.perf_counter,
) -> RefinementResult:
    """Run the critique -> plan -> edit cycle until a termination criterion holds.

    The trace and the acceptance test use the unweighted severity sum; the
    escalating issue weights steer planning and the threshold test.
    """
    if critic is None:
        critic = lambda d, c: critique(d, c, config.thresholds)  # noqa: E731
    start = clock()

    def elapsed_ms() -> float:
        return (clock() - start) * 1000.0

    weights: dict[IssueKey, float] = {}
    current = critic(draft, concept)
    trace = [TraceRecord(draft.iteration, aggregate_severity(current), len(current), 0, elapsed_ms())]
    critiques = [current]
    log_records: list[dict] = []
    skipped: list[str] = []
    t0 = draft.iteration

    while True:
        if weighted_max(current, weights) < config.severity_threshold:
            break
        if draft.iteration - t0 >= config.max_iterations:
            break
        if elapsed_ms() > config.time_budget_s * 1000.0:
            break

        plan = plan_edits(current, draft, weights, config.thresholds, skipped)
        candidate = draft
        applied: list[EditCommand] = []
        for cmd in plan:
            try:
                candidate = apply(candidate, cmd)
                applied.append(cmd)
            except (EditError, SirError) as exc:
                log.info("skipping %s on iteration %d: %s", cmd.primitive, draft.iteration, exc)
                skipped.append(f"{cmd.target}:{cmd.primitive}:{exc}")
        if not applied:
            break
        candidate = candidate.with_iteration(draft.iteration + 1)
        new = critic(candidate, concept)
        if config.accept_only_improving and not aggregate_severity(new) < aggregate_severity(current):
            break

        surviving = {i.key for i in current} & {i.key for i in new}
        weights = {k: weights.get(k, 1.0) * config.escalation_factor for k in surviving}
        draft, current = candidate, new
        critiques.append(current)
        log_records.extend({"t": draft.iteration, **c.to_dict()} for c in applied)
        trace.append(TraceRecord(draft.iteration, aggregate_severity(current), len(current), len(applied), elapsed_ms()))

    return RefinementResult(draft, trace, log_records, critiques, weights, skipped)


# ---------------------------------------------------------------- corpus and traces


def corrupt(
    draft: SlideDraft,
    rng: random.Random,
    jitter: float = 7.0,
    shift_prob: float = 0.25,
    shift: tuple[float, float] = (40.0, 120.0),
    text_boost: int = 6,
) -> SlideDraft:
    """Randomly damage a clean draft.

    Every element is jittered by up to ``jitter`` px; some are also pushed by a
    larger ``shift`` in one direction (overlaps, leaving the canvas); bullet
    lists gain up to ``text_boost`` padded bullets (overflow).
    """
    from .edits import move_element

    out = draft
    for el in draft.elements:
        dx, dy = rng.uniform(-jitter, jitter), rng.uniform(-jitter, jitter)
        if rng.random() < shift_prob:
            amount = rng.uniform(*shift)
            if rng.random() < 0.5:
                dx += rng.choice((-1, 1)) * amount
            else:
                dy += rng.choice((-1, 1)) * amount
        out = move_element(out, el.id, dx, dy)
        if isinstance(el.content, TextBody) and text_boost:
            bullets = list(el.content.bullets)
            for k in range(rng.randint(1, text_boost)):
                src = bullets[rng.randrange(len(bullets))]
                bullets.append(f"{src}, with further detail {k + 1} on this point")
            cur = get_element(out, el.id)
            out = out.replace_element(replace(cur, content=TextBody(tuple(bullets))))
    return out


@dataclass(frozen=True)
class QualityCostRow:
    k: int
    mean_severity: float
    mean_elapsed_ms: float


def quality_cost_trace(
    corpus: Sequence[tuple[SlideDraft, SlideConcept | None]],
    max_k: int = 8,
    config: RefinementConfig = RefinementConfig(),
) -> list[QualityCostRow]:
    """Mean final severity and elapsed time for every budget K in 0..max_k.

    One run per draft with ``max_iterations=max_k``; the state after K accepted
    iterations is exactly what a run capped at K would return, because the
    loop is deterministic and never looks ahead.
    """
    if not corpus:
        raise ValueError("corpus must be non-empty")
    cfg = replace(config, max_iterations=max_k)
    sev = [[0.0] * len(corpus) for _ in range(max_k + 1)]
    ms = [[0.0] * len(corpus) for _ in range(max_k + 1)]
    for j, (draft, concept) in enumerate(corpus):
        trace = refine(draft, concept, cfg).trace
        for k in range(max_k + 1):
            rec = trace[min(k, len(trace) - 1)]
            sev[k][j] = rec.aggregate_severity
            ms[k][j] = rec.elapsed_ms
    return [QualityCostRow(k, sum(sev[k]) / len(corpus), sum(ms[k]) / len(corpus)) for k in range(max_k + 1)]


def write_quality_cost_csv(path: str | Path, rows: Sequence[QualityCostRow]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["K", "severity", "ms"])
        for r in rows:
            w.writerow([r.k, f"{r.mean_severity:.6f}", f"{r.mean_elapsed_ms:.3f}"])


def write_trace_csv(path: str | Path, traces: Sequence[Sequence[TraceRecord]], with_timing: bool = True) -> None:
    """One row per (slide, iteration). ``ms`` is blank when timing is off."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["slide", "t", "aggregate_severity", "issues", "commands", "ms"])
        for s, trace in enumerate(traces, start=1):
            for r in trace:
                ms = f"{r.elapsed_ms:.3f}" if with_timing else ""
                w.writerow([s, r.t, f"{r.aggregate_severity:.6f}", r.issues_count, r.commands_applied, ms])


def is_strictly_decreasing(values: Sequence[float]) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


def severity_ratio(rows: Sequence[QualityCostRow], k: int) -> float:
    base = rows[0].mean_severity
    return math.nan if base == 0 else rows[k].mean_severity / base
