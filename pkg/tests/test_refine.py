from __future__ import annotations

import csv
import itertools
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slidesynth.cli import build_corrupted_corpus, demo_concepts_path
from slidesynth.concepts import load_concepts
from slidesynth.critics import (
    MISALIGNMENT,
    OUT_OF_BOUNDS,
    OVERFLOW,
    OVERLAP,
    VERBOSE_BULLET,
    CritiqueIssue,
    CritiqueList,
    visual_critic,
)
from slidesynth.edits import EditCommand, replay
from slidesynth.render import required_height
from slidesynth.refine import (
    RefinementConfig,
    aggregate_severity,
    corrupt,
    is_strictly_decreasing,
    plan_edits,
    plan_issue,
    quality_cost_trace,
    refine,
    severity_ratio,
    weighted_max,
    write_quality_cost_csv,
    write_trace_csv,
)
from slidesynth.sir import Geometry, SlideDraft, SlideElement, Style, TextBody, Title, get_element, to_json


def off_center_title() -> SlideDraft:
    return SlideDraft(
        "SLIDE_TITLE",
        (SlideElement("title", "ELEM_TITLE", Geometry(246, 20, 800, 80), Style(font_size=36), Title("Quarterly review")),),
    )


def demo_corpus(n=50, seed=0):
    return build_corrupted_corpus(load_concepts(demo_concepts_path()), n, seed)


class TestAggregate:
    def test_empty(self):
        assert aggregate_severity([]) == 0 and weighted_max([]) == 0

    def test_sum(self):
        issues = [CritiqueIssue("a", OVERFLOW, 0.9), CritiqueIssue("b", MISALIGNMENT, 0.75, "slide_bounds")]
        assert aggregate_severity(issues) == pytest.approx(1.65)

    def test_weighted(self):
        i = CritiqueIssue("a", OVERFLOW, 0.4)
        assert aggregate_severity([i], {i.key: 1.5}) == pytest.approx(0.6)
        assert weighted_max([i], {i.key: 1.5}) == pytest.approx(0.6)


class TestConfig:
    @pytest.mark.parametrize("kw", [{"severity_threshold": 0}, {"severity_threshold": 1}, {"max_iterations": -1}, {"escalation_factor": 0.9}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            RefinementConfig(**kw)


class TestPlanner:
    def test_misalignment_golden(self):
        d = off_center_title()
        plan = plan_edits(visual_critic(d), d)
        assert [c.to_dict() for c in plan] == [
            {"primitive": "adjust_alignment", "params": {"id": "title", "reference_id": "slide_bounds", "alignment_type": "center_h"}}
        ]

    def test_empty(self):
        assert plan_edits(CritiqueList(), off_center_title()) == []

    def test_one_issue_per_element(self):
        d = off_center_title()
        issues = [
            CritiqueIssue("title", MISALIGNMENT, 0.75, "slide_bounds", "Center the title horizontally"),
            CritiqueIssue("title", OUT_OF_BOUNDS, 0.5, "slide_bounds", "Move title inside the slide"),
        ]
        (cmd,) = plan_edits(issues, d)
        assert cmd.primitive == "adjust_alignment"

    def test_weights_change_priority(self):
        d = SlideDraft("SLIDE_BLANK", (SlideElement("title", "ELEM_TITLE", Geometry(-40, 20, 800, 80), Style(), Title("x")),))
        mis = CritiqueIssue("title", MISALIGNMENT, 0.75, "slide_bounds", "Center the title horizontally")
        oob = CritiqueIssue("title", OUT_OF_BOUNDS, 0.5, "slide_bounds", "Move title inside the slide")
        (cmd,) = plan_edits([mis, oob], d, {oob.key: 2.0})
        assert cmd.to_dict() == {"primitive": "move_element", "params": {"id": "title", "dx": 40.0, "dy": 0.0}}

    def test_overflow_rule(self):
        bullets = TextBody(tuple(f"w{i}" for i in range(19)))
        el = SlideElement("body", "ELEM_TEXT_BODY", Geometry(0, 0, 400, 130), Style(font_size=10), bullets)
        d = SlideDraft("SLIDE_BLANK", (el,))
        cmds = plan_issue(d, CritiqueIssue("body", OVERFLOW, 0.9))
        assert [c.primitive for c in cmds] == ["change_style", "delete_bullet_point"]
        assert cmds[0].params["value"] == pytest.approx(9.0)
        assert cmds[1].params["index"] == 18

    def test_overflow_font_only_when_enough(self):
        el = SlideElement("body", "ELEM_TEXT_BODY", Geometry(0, 0, 400, 25), Style(font_size=20), TextBody(("one",)))
        d = SlideDraft("SLIDE_BLANK", (el,))
        (cmd,) = plan_issue(d, CritiqueIssue("body", OVERFLOW, 0.04))
        assert cmd.params == {"id": "body", "attribute": "font_size", "value": 18.0}
        assert required_height(replace(el, style=Style(font_size=18))) <= 25

    def test_overflow_floor(self):
        el = SlideElement("body", "ELEM_TEXT_BODY", Geometry(0, 0, 400, 5), Style(font_size=6), TextBody(("a",)))
        assert plan_issue(SlideDraft("SLIDE_BLANK", (el,)), CritiqueIssue("body", OVERFLOW, 1.0)) == []

    @pytest.mark.parametrize(
        "geom,delta",
        [((-30, 10, 100, 100), (30, 0)), ((1250, 700, 100, 100), (-70, -80)), ((10, -5, 100, 100), (0, 5))],
    )
    def test_out_of_bounds_minimal(self, geom, delta):
        d = SlideDraft("SLIDE_BLANK", (SlideElement("e", "ELEM_IMAGE", Geometry(*geom)),))
        (cmd,) = plan_issue(d, CritiqueIssue("e", OUT_OF_BOUNDS, 0.3, "slide_bounds"))
        assert (cmd.params["dx"], cmd.params["dy"]) == delta

    def test_overlap_least_motion(self):
        a = SlideElement("a", "ELEM_TEXT_BODY", Geometry(0, 0, 200, 100))
        b = SlideElement("b", "ELEM_TEXT_BODY", Geometry(180, 50, 200, 100), z_order=1)
        d = SlideDraft("SLIDE_BLANK", (a, b))
        (issue,) = [i for i in visual_critic(d) if i.issue_type == OVERLAP]
        (cmd,) = plan_issue(d, issue)
        assert cmd.params == {"id1": "a", "id2": "b", "target_space": 12.0, "direction": "horizontal"}

    def test_verbose_is_skipped(self):
        skipped: list[str] = []
        plan = plan_edits([CritiqueIssue("e", VERBOSE_BULLET, 0.4)], off_center_title(), skipped=skipped)
        assert plan == [] and skipped == ["e:verbose_bullet"]


class TestRefine:
    def test_clean_draft(self):
        d = SlideDraft("SLIDE_TITLE", (SlideElement("title", "ELEM_TITLE", Geometry(240, 20, 800, 80), Style(), Title("ok")),))
        res = refine(d)
        assert res.draft == d and len(res.trace) == 1 and res.trace[0].t == 0

    def test_off_center_title_fixed_in_one_iteration(self):
        res = refine(off_center_title())
        assert get_element(res.draft, "title").geometry.x == 240
        assert len(res.final_critique) == 0
        assert [r.t for r in res.trace] == [0, 1]
        assert res.draft.iteration == 1

    def test_k_zero(self):
        res = refine(off_center_title(), config=RefinementConfig(max_iterations=0))
        assert res.draft == off_center_title() and len(res.trace) == 1

    def test_time_budget(self):
        ticks = itertools.count(0, 100.0)
        res = refine(off_center_title(), config=RefinementConfig(time_budget_s=1), clock=lambda: next(ticks))
        assert len(res.trace) == 1

    def test_weight_escalation_is_geometric(self):
        persistent = CritiqueIssue("note", VERBOSE_BULLET, 0.3)

        def critic(d, concept):
            fading = [0.9, 0.6, 0.3][d.iteration] if d.iteration < 3 else None
            issues = [persistent]
            if fading is not None:
                issues.append(CritiqueIssue("title", MISALIGNMENT, fading, "slide_bounds", "Center the title horizontally"))
            return CritiqueList(tuple(issues), d.iteration)

        cfg = RefinementConfig(escalation_factor=1.5)
        res = refine(off_center_title(), config=cfg, critic=critic)
        assert [r.t for r in res.trace] == [0, 1, 2, 3]
        assert res.weights == {persistent.key: 1.5**3}

    def test_rejects_non_improving_candidate(self):
        def critic(d, concept):
            return CritiqueList((CritiqueIssue("title", MISALIGNMENT, 0.5, "slide_bounds", "Center the title horizontally"),))

        res = refine(off_center_title(), critic=critic)
        assert len(res.trace) == 1 and res.draft == off_center_title()

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000))
    def test_strictly_decreasing_and_replayable(self, seed):
        for draft, concept in demo_corpus(5, seed):
            res = refine(draft, concept)
            sev = [r.aggregate_severity for r in res.trace]
            assert is_strictly_decreasing(sev)
            assert [r.t for r in res.trace] == list(range(len(res.trace)))
            assert len(res.trace) - 1 <= 5
            assert to_json(replay(draft, res.commands)) == to_json(res.draft)

    def test_commands_log_shape(self):
        res = refine(off_center_title())
        assert res.commands == [
            {"t": 1, "primitive": "adjust_alignment", "params": {"id": "title", "reference_id": "slide_bounds", "alignment_type": "center_h"}}
        ]
        EditCommand.from_dict(res.commands[0]).check()


class TestCorruption:
    def test_deterministic(self):
        a = demo_corpus(10, 3)
        b = demo_corpus(10, 3)
        assert [to_json(d) for d, _ in a] == [to_json(d) for d, _ in b]

    def test_introduces_defects(self):
        kinds = {i.issue_type for d, _ in demo_corpus(50, 0) for i in visual_critic(d)}
        assert {MISALIGNMENT, OUT_OF_BOUNDS, OVERLAP, OVERFLOW} <= kinds

    def test_no_text_boost_keeps_content(self):
        import random

        d, _ = demo_corpus(2, 0)[1]
        out = corrupt(d, random.Random(0), text_boost=0)
        assert [e.content for e in out.elements] == [e.content for e in d.elements]


class TestQualityCost:
    def test_prefix_equals_capped_run(self):
        corpus = demo_corpus(12, 1)
        rows = quality_cost_trace(corpus, max_k=4)
        for k in range(5):
            cfg = RefinementConfig(max_iterations=k)
            direct = sum(refine(d, c, cfg).trace[-1].aggregate_severity for d, c in corpus) / len(corpus)
            assert rows[k].mean_severity == pytest.approx(direct, rel=1e-12, abs=1e-15)

    def test_k0_is_initial_level(self):
        corpus = demo_corpus(6, 2)
        rows = quality_cost_trace(corpus, max_k=2)
        from slidesynth.critics import critique

        initial = sum(aggregate_severity(critique(d, c)) for d, c in corpus) / len(corpus)
        assert rows[0].mean_severity == pytest.approx(initial, rel=1e-12)

    def test_monotone_trend(self):
        rows = quality_cost_trace(demo_corpus(20, 4), max_k=8)
        sev = [r.mean_severity for r in rows]
        ms = [r.mean_elapsed_ms for r in rows]
        assert all(b <= a for a, b in zip(sev, sev[1:]))
        assert all(b >= a for a, b in zip(ms, ms[1:]))
        assert severity_ratio(rows, 5) <= 0.25

    def test_csv(self, tmp_path):
        rows = quality_cost_trace(demo_corpus(3, 0), max_k=2)
        path = tmp_path / "qc.csv"
        write_quality_cost_csv(path, rows)
        got = list(csv.reader(path.open()))
        assert got[0] == ["K", "severity", "ms"] and [r[0] for r in got[1:]] == ["0", "1", "2"]

    def test_trace_csv_without_timing(self, tmp_path):
        res = refine(off_center_title())
        path = tmp_path / "trace.csv"
        write_trace_csv(path, [res.trace], with_timing=False)
        got = list(csv.reader(path.open()))
        assert got[0] == ["slide", "t", "aggregate_severity", "issues", "commands", "ms"]
        assert got[1] == ["1", "0", "0.750000", "1", "0", ""]

    def test_empty_corpus(self):
        with pytest.raises(ValueError):
            quality_cost_trace([])
