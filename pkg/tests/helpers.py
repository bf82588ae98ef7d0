"""Shared generators for tests: random LDL sequences, random drafts, fixtures."""

from __future__ import annotations

import math
import random
from dataclasses import asdict
from pathlib import Path

import numpy as np
from hypothesis import strategies as st

from slidesynth.edits import ANCHORS, EditCommand
from slidesynth.ingest import NOISE, ClusterConfig, dbscan_cluster
from slidesynth.ldl import EOS_ID, SEP_ID, SOS_ID, VOCAB, VOCAB_SIZE, TokenKind
from slidesynth.prototype import N_CONDITIONS, LpgModel, TrainingPair
from slidesynth.sir import (
    Empty,
    Footer,
    Geometry,
    Image,
    SlideDraft,
    SlideElement,
    Style,
    Subtitle,
    TextBody,
    Title,
)

FIXTURES = Path(__file__).parent / "fixtures"

SLIDE_TYPE_IDS = [t.id for t in VOCAB.of_kind(TokenKind.SLIDE_TYPE)]
ELEM_TYPE_IDS = [t.id for t in VOCAB.of_kind(TokenKind.ELEM_TYPE)]
ATTR_IDS = [t.id for t in VOCAB.of_kind(TokenKind.ATTR)]
POS_IDS = [t.id for t in VOCAB.of_kind(TokenKind.POS)]

WORDS = "alpha beta gamma delta layout slide chart metric growth region trend summary".split()


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


# ---------------------------------------------------------------- LDL


def random_ldl_ids(rng: random.Random, max_elements: int = 8) -> list[int]:
    """A grammatical id sequence (at most 128 tokens) drawn from ``rng``."""
    while True:
        ids = [SOS_ID, rng.choice(SLIDE_TYPE_IDS)]
        ids += rng.sample(ATTR_IDS, rng.randint(0, 2))
        for _ in range(rng.randint(0, max_elements)):
            ids += [SEP_ID, rng.choice(ELEM_TYPE_IDS)]
            mods = rng.sample(ATTR_IDS, rng.randint(0, 3)) + [rng.choice(POS_IDS) for _ in range(rng.randint(0, 3))]
            rng.shuffle(mods)
            ids += mods
        if rng.random() < 0.2:
            ids.append(SEP_ID)
        ids.append(EOS_ID)
        if len(ids) <= 128:
            return ids


@st.composite
def ldl_ids(draw) -> list[int]:
    return random_ldl_ids(random.Random(draw(st.integers(0, 2**32 - 1))))


# ---------------------------------------------------------------- drafts


def _color(rng: random.Random) -> str:
    return "#%06X" % rng.randrange(0x1000000)


def random_style(rng: random.Random) -> Style:
    return Style(
        font_size=rng.choice([10, 12, 14, 18, 24, 36, rng.uniform(6, 96)]),
        font_weight=rng.choice(["normal", "bold"]),
        font_color=_color(rng),
        fill_color=rng.choice([None, _color(rng)]),
        border_color=rng.choice([None, _color(rng)]),
        border_width=rng.choice([0.0, 1.0, 2.5]),
        text_alignment=rng.choice(["left", "center", "right"]),
        opacity=rng.choice([1.0, 0.5, rng.random()]),
    )


def _sentence(rng: random.Random, lo: int = 2, hi: int = 12) -> str:
    return " ".join(rng.choice(WORDS) for _ in range(rng.randint(lo, hi)))


def random_content(rng: random.Random):
    kind = rng.randrange(6)
    if kind == 0:
        return TextBody(tuple(_sentence(rng) for _ in range(rng.randint(1, 6))))
    if kind == 1:
        return Image(f"doc_img_{rng.randint(1, 999):03d}", rng.choice([16 / 9, 1.0, 0.75]))
    if kind == 2:
        return Title(_sentence(rng, 1, 6))
    if kind == 3:
        return Subtitle(_sentence(rng, 2, 9))
    if kind == 4:
        return Footer(_sentence(rng, 1, 5))
    return Empty()


_ELEM_FOR = {TextBody: "ELEM_TEXT_BODY", Image: "ELEM_IMAGE", Title: "ELEM_TITLE", Subtitle: "ELEM_SUBTITLE", Footer: "ELEM_FOOTER", Empty: "ELEM_HEADER"}


def random_draft(rng: random.Random, min_elements: int = 1, max_elements: int = 6) -> SlideDraft:
    els = []
    for i in range(rng.randint(min_elements, max_elements)):
        content = random_content(rng)
        g = Geometry(rng.uniform(-50, 1200), rng.uniform(-50, 680), rng.uniform(10, 600), rng.uniform(10, 400))
        els.append(SlideElement(f"el_{i}", _ELEM_FOR[type(content)], g, random_style(rng), content, rng.randint(0, 3)))
    return SlideDraft("SLIDE_CONTENT_SINGLE_COL", tuple(els), rng.randint(0, 3))


@st.composite
def drafts(draw, min_elements: int = 1, max_elements: int = 6) -> SlideDraft:
    return random_draft(random.Random(draw(st.integers(0, 2**32 - 1))), min_elements, max_elements)


def text_draft(rng: random.Random) -> SlideDraft:
    """A random draft whose first element is guaranteed to hold bullets."""
    d = random_draft(rng)
    first = d.elements[0]
    bullets = TextBody(tuple(_sentence(rng) for _ in range(rng.randint(1, 5))))
    return d.replace_element(SlideElement(first.id, "ELEM_TEXT_BODY", first.geometry, first.style, bullets, first.z_order))


# ---------------------------------------------------------------- edits


def random_command(rng: random.Random, d: SlideDraft, kind: int | None = None) -> EditCommand:
    """A random, possibly invalid, command; ``kind`` indexes the nine primitives."""
    ids = d.ids
    eid = rng.choice(ids)
    kind = rng.randrange(9) if kind is None else kind
    if kind == 0:
        return EditCommand("move_element", {"id": eid, "dx": rng.uniform(-50, 50), "dy": rng.uniform(-50, 50)})
    if kind == 1:
        ref = rng.choice(ids + ["slide_bounds", "slide_center"])
        return EditCommand("adjust_alignment", {"id": eid, "reference_id": ref, "alignment_type": rng.choice(["left", "right", "top", "bottom", "center_h", "center_v"])})
    if kind == 2:
        return EditCommand("resize_element", {"id": eid, "dw": rng.uniform(-5, 20), "dh": rng.uniform(-5, 20), "anchor_point": rng.choice(sorted(ANCHORS))})
    if kind == 3:
        return EditCommand("rewrite_bullet_point", {"id": eid, "index": rng.randrange(3), "new_text": "rewritten"})
    if kind == 4:
        return EditCommand("delete_bullet_point", {"id": eid, "index": rng.randrange(3)})
    if kind == 5:
        return EditCommand("change_style", {"id": eid, "attribute": "font_size", "value": rng.choice([4, 12, 20])})
    if kind == 6:
        return EditCommand("recolor_element", {"id": eid, "property": rng.choice(["fill", "text", "border"]), "color_value": "#%06X" % rng.randrange(1 << 24)})
    if kind == 7:
        return EditCommand("reformat_text", {"id": eid, "style_params": {"font_weight": "bold", "opacity": rng.choice([0.5, 2.0])}})
    other = rng.choice(ids)
    return EditCommand("adjust_spacing", {"id1": eid, "id2": other, "target_space": rng.uniform(-2, 40), "direction": rng.choice(["horizontal", "vertical"])})


# fields of the target element each primitive may touch
ALLOWED = {
    "move_element": {"geometry.x", "geometry.y"},
    "adjust_alignment": {"geometry.x", "geometry.y"},
    "resize_element": {"geometry.x", "geometry.y", "geometry.w", "geometry.h"},
    "rewrite_bullet_point": {"content"},
    "delete_bullet_point": {"content"},
    "change_style": {"style.font_size"},
    "recolor_element": {"style.fill_color", "style.font_color", "style.border_color"},
    "reformat_text": {"style.font_weight", "style.opacity"},
    "adjust_spacing": {"geometry.x", "geometry.y"},
}


def flat(el: SlideElement) -> dict:
    out = {"id": el.id, "elem_type": el.elem_type, "z_order": el.z_order, "content": el.content}
    for group in ("geometry", "style"):
        for k, v in asdict(getattr(el, group)).items():
            out[f"{group}.{k}"] = v
    return out


# ---------------------------------------------------------------- models and gradients


def sliced_model(seed: int, conditions, scale: float = 1.0, l2: float = 1e-4) -> LpgModel:
    """Zero table with random logits only on the given condition slices (cheap to build)."""
    rng = np.random.default_rng(seed)
    logits = np.zeros((N_CONDITIONS, VOCAB_SIZE, VOCAB_SIZE))
    for c in conditions:
        logits[c] = rng.normal(0.0, scale, (VOCAB_SIZE, VOCAB_SIZE))
    return LpgModel(logits, l2)


def chain_rule_nll(model: LpgModel, pair: TrainingPair) -> float:
    """Probability of the whole target as an explicit product of softmax ratios."""
    c = pair.features.condition
    prob = 1.0
    for prev, nxt in zip(pair.target, pair.target[1:]):
        row = [float(v) for v in model.logits[c, prev]]
        top = max(row)
        denom = math.fsum(math.exp(v - top) for v in row)
        prob *= math.exp(row[nxt] - top) / denom
    return -math.log(prob)


def fd_check(f, w: np.ndarray, grad: np.ndarray, eps: float = 1e-6) -> None:
    for idx in np.ndindex(w.shape):
        orig = w[idx]
        w[idx] = orig + eps
        up = f()
        w[idx] = orig - eps
        down = f()
        w[idx] = orig
        fd = (up - down) / (2 * eps)
        scale = max(abs(fd), abs(grad[idx]))
        if scale > 1e-8:
            assert abs(fd - grad[idx]) / scale < 1e-4, idx
        else:
            assert abs(fd - grad[idx]) < 1e-8


# ---------------------------------------------------------------- clustering


def cos_dist(a, b) -> float:
    na = math.sqrt(sum(v * v for v in a))
    nb = math.sqrt(sum(v * v for v in b))
    if na == 0 or nb == 0:
        return 0.0 if a is b else 1.0
    return max(0.0, 1.0 - sum(x * y for x, y in zip(a, b)) / (na * nb))


def brute_dbscan(points, eps, min_pts):
    """Reference DBSCAN: core points, connected components among cores, then borders."""
    n = len(points)
    nb = [[j for j in range(n) if j == i or cos_dist(points[i], points[j]) <= eps] for i in range(n)]
    core = [len(x) >= min_pts for x in nb]
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in nb[i]:
            if core[i] and core[j]:
                parent[find(i)] = find(j)
    comp = {}
    for i in range(n):
        if core[i]:
            comp.setdefault(find(i), []).append(i)
    return core, nb, [set(v) for v in comp.values()]


def canonical(labels):
    remap, out = {}, []
    for lab in labels:
        if lab == NOISE:
            out.append(NOISE)
        else:
            out.append(remap.setdefault(lab, len(remap)))
    return out


def check_against_oracle(points, eps, min_pts):
    labels = dbscan_cluster(points, ClusterConfig(min_pts=min_pts, eps=eps))
    core, nb, comps = brute_dbscan(points, eps, min_pts)
    # cores partition exactly as the oracle's components
    by_label = {}
    for i, lab in enumerate(labels):
        if core[i]:
            by_label.setdefault(lab, set()).add(i)
    assert sorted(map(sorted, by_label.values())) == sorted(map(sorted, comps))
    for i, lab in enumerate(labels):
        core_nbrs = [j for j in nb[i] if core[j]]
        if core[i]:
            continue
        if core_nbrs:
            # a border point joins the cluster of one of its core neighbours
            assert lab in {labels[j] for j in core_nbrs}
        else:
            assert lab == NOISE
    return labels


def three_blobs(seed: int, per: int = 10):
    rng = np.random.default_rng(seed)
    centers = np.eye(3) * 5 + 0.5
    pts = np.concatenate([c + rng.normal(0, 0.05, (per, 3)) for c in centers])
    return pts
