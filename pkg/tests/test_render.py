from __future__ import annotations

import math
import random
import textwrap
import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import WORDS, drafts
from slidesynth.critics import detect_overflow
from slidesynth.render import (
    TextMetrics,
    measure_text,
    render_index_html,
    render_svg,
    required_height,
    wrap_text,
)
from slidesynth.sir import Geometry, Image, SlideDraft, SlideElement, Style, TextBody, Title

SVG = "{http://www.w3.org/2000/svg}"

words = st.lists(st.text(alphabet="abcdefghij", min_size=1, max_size=25), max_size=40).map(" ".join)


def oracle_wrap(text, font_size, width):
    limit = max(1, math.floor(width / (0.6 * font_size) + 1e-9))
    return textwrap.wrap(text, width=limit, break_long_words=False, break_on_hyphens=False)


class TestMeasure:
    def test_empty(self):
        assert measure_text("", 18, 500) == 0

    def test_single_line(self):
        assert measure_text("hello", 18, 1000) == pytest.approx(23.4)

    def test_nonpositive_width(self):
        with pytest.raises(ValueError):
            measure_text("x", 12, 0)

    def test_long_word_alone(self):
        assert wrap_text("a " + "x" * 50 + " b", 10, 60) == ["a", "x" * 50, "b"]

    @settings(max_examples=300, deadline=None)
    @given(words, st.sampled_from([8, 10, 12, 18, 24, 36]), st.floats(20, 1200))
    def test_wrap_matches_textwrap(self, text, fs, width):
        assert wrap_text(text, fs, width) == oracle_wrap(text, fs, width)
        assert measure_text(text, fs, width) == pytest.approx(len(oracle_wrap(text, fs, width)) * 1.3 * fs)

    @settings(max_examples=200, deadline=None)
    @given(words, st.sampled_from([6, 8, 10, 12, 18, 24, 36, 48]), st.floats(50, 1200))
    def test_monotone_in_font_size(self, text, fs, width):
        assert measure_text(text, 2 * fs, width) >= measure_text(text, fs, width)

    @settings(max_examples=200, deadline=None)
    @given(words, words, st.floats(50, 1200))
    def test_monotone_in_length(self, a, b, width):
        assert measure_text((a + " " + b).strip(), 12, width) >= measure_text(a, 12, width)

    def test_metrics_validated(self):
        with pytest.raises(ValueError):
            TextMetrics(char_width_factor=0)


def text_el(eid, x, y, w, h, bullets, fs=12):
    return SlideElement(eid, "ELEM_TEXT_BODY", Geometry(x, y, w, h), Style(font_size=fs), TextBody(tuple(bullets)))


class TestSvg:
    def test_empty_slide(self):
        root = ET.fromstring(render_svg(SlideDraft("SLIDE_BLANK")))
        assert root.get("viewBox") == "0 0 1280 720"
        assert [c.tag for c in root] == [SVG + "rect"]

    def test_centered_title_anchor(self):
        el = SlideElement("title", "ELEM_TITLE", Geometry(440, 20, 400, 80), Style(font_size=36, text_alignment="center"), Title("Hi"))
        root = ET.fromstring(render_svg(SlideDraft("SLIDE_TITLE", (el,))))
        (text,) = root.iter(SVG + "text")
        assert text.get("x") == "640" and text.get("text-anchor") == "middle"

    def test_image_placeholder(self):
        el = SlideElement("img", "ELEM_IMAGE", Geometry(0, 0, 160, 90), Style(), Image("doc_img_007", 16 / 9))
        root = ET.fromstring(render_svg(SlideDraft("SLIDE_BLANK", (el,))))
        assert [t.text for t in root.iter(SVG + "text")] == ["doc_img_007"]

    def test_z_order_then_declaration(self):
        a = text_el("a", 0, 0, 100, 100, ["x"])
        b = text_el("b", 0, 0, 100, 100, ["y"])
        c = SlideElement("c", "ELEM_TEXT_BODY", Geometry(0, 0, 10, 10), Style(), TextBody(("z",)), -1)
        root = ET.fromstring(render_svg(SlideDraft("SLIDE_BLANK", (a, b, c))))
        assert [g.get("id") for g in root.iter(SVG + "g")] == ["c", "a", "b"]

    @settings(max_examples=100, deadline=None)
    @given(drafts(0, 8))
    def test_deterministic_well_formed(self, d):
        raw = render_svg(d)
        assert raw == render_svg(d)
        ET.fromstring(raw)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_overflow_free_text_stays_in_box(self, seed):
        rng = random.Random(seed)
        bullets = [" ".join(rng.choice(WORDS) for _ in range(rng.randint(1, 10))) for _ in range(rng.randint(1, 5))]
        fs = rng.choice([10, 12, 18])
        el = text_el("t", 100, 100, rng.uniform(150, 700), rng.uniform(30, 500), bullets, fs)
        d = SlideDraft("SLIDE_BLANK", (el,))
        lines = [t for t in ET.fromstring(render_svg(d)).iter(SVG + "text") if t.text != "•"]
        if not detect_overflow(d):
            assert required_height(el) <= el.geometry.h
            # last baseline sits inside the box and no line is wider than the text area
            assert float(lines[-1].get("y")) <= el.geometry.bottom
            limit = math.floor((el.geometry.w - 1.2 * fs) / (0.6 * fs) + 1e-9)
            assert all(len(t.text) <= limit or " " not in t.text for t in lines)


def test_index_html_lists_in_order():
    html = render_index_html(["slide_001.svg", "slide_002.svg"]).decode()
    assert html.index("slide_001.svg") < html.index("slide_002.svg")
