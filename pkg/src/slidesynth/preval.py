"""Deck quality assessment with preference-trained dimensional scorers.

A deck is reduced to a small vector of interpretable layout features. Each
quality dimension scores it linearly, and a calibrated sigmoid maps the raw
score into (0, 1). The dimensions are then combined with simplex weights.
Scorers are trained from pairwise preferences with a logistic ranking loss,
plus an auxiliary multi-label loss over rationale tags.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .critics import OVERFLOW, CriticThresholds, CritiqueList, critique
from .render import METRICS, required_height
from .sir import CANVAS_HEIGHT, CANVAS_WIDTH, Geometry, SlideDraft, TextBody, text_lines

DIMENSIONS = ("content", "coherence", "design")
FEATURE_NAMES = (
    "alignment_score",
    "whitespace_ratio",
    "whitespace_variance",
    "element_count",
    "mean_text_fill_rate",
    "overflow_issue_count",
    "overlap_area_ratio",
    "mean_font_size",
    "color_count",
    "bullet_count",
)
N_FEATURES = len(FEATURE_NAMES)
N_WEIGHTS = N_FEATURES + 1  # trailing bias slot, always 1.0
TAG_VOCAB = (
    "text_overflow",
    "irrelevant_image",
    "logical_clarity",
    "misalignment",
    "overlap",
    "cluttered",
    "sparse",
    "inconsistent_fonts",
    "too_many_colors",
    "poor_contrast",
    "weak_title",
    "redundant_content",
    "missing_visual",
    "good_flow",
    "balanced_layout",
    "concise_text",
)
LABELS = ("A_better", "B_better", "tie")

ELEMENT_COUNT_NORM = 20.0
FONT_SIZE_NORM = 96.0
COLOR_COUNT_NORM = 8.0
BULLET_COUNT_NORM = 20.0
GRID = 4


class PrevalError(ValueError):
    pass


class EmptyDeck(PrevalError):
    pass


class DimensionMismatch(PrevalError):
    pass


class WeightSumError(PrevalError):
    pass


class TiePair(PrevalError):
    pass


class LengthMismatch(PrevalError):
    pass


class NonFiniteLoss(FloatingPointError):
    pass


# ---------------------------------------------------------------- features


def _union_area(boxes: Sequence[Geometry], clip: Geometry) -> float:
    """Area of the union of ``boxes`` inside ``clip`` (coordinate compression)."""
    rects = []
    for g in boxes:
        x0, y0 = max(g.x, clip.x), max(g.y, clip.y)
        x1, y1 = min(g.right, clip.right), min(g.bottom, clip.bottom)
        if x1 > x0 and y1 > y0:
            rects.append((x0, y0, x1, y1))
    if not rects:
        return 0.0
    xs = sorted({r[0] for r in rects} | {r[2] for r in rects})
    ys = sorted({r[1] for r in rects} | {r[3] for r in rects})
    total = 0.0
    for i in range(len(xs) - 1):
        for j in range(len(ys) - 1):
            cx, cy = (xs[i] + xs[i + 1]) / 2, (ys[j] + ys[j + 1]) / 2
            if any(r[0] <= cx < r[2] and r[1] <= cy < r[3] for r in rects):
                total += (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j])
    return total


_GUIDES = ("x", "right", "cx", "y", "bottom", "cy")


def _alignment_score(draft: SlideDraft, tol: float) -> float:
    els = draft.elements
    hits = total = 0
    for i in range(len(els)):
        for j in range(i + 1, len(els)):
            a, b = els[i].geometry, els[j].geometry
            for guide in _GUIDES:
                total += 1
                hits += abs(getattr(a, guide) - getattr(b, guide)) <= tol
    return hits / total if total else 1.0


def _slide_features(draft: SlideDraft, crit: CritiqueList, tol: float) -> dict[str, float]:
    canvas = Geometry(0, 0, CANVAS_WIDTH, CANVAS_HEIGHT)
    boxes = [el.geometry for el in draft.elements]
    covered = _union_area(boxes, canvas)
    cw, ch = CANVAS_WIDTH / GRID, CANVAS_HEIGHT / GRID
    cell_ws = [
        1.0 - _union_area(boxes, Geometry(c * cw, r * ch, cw, ch)) / (cw * ch) for r in range(GRID) for c in range(GRID)
    ]
    overlap = sum(
        boxes[i].intersection_area(boxes[j]) for i in range(len(boxes)) for j in range(i + 1, len(boxes))
    )
    text_els = [el for el in draft.elements if text_lines(el.content)]
    colors = set()
    for el in draft.elements:
        colors.update(c for c in (el.style.font_color, el.style.fill_color, el.style.border_color) if c)
    n = len(draft.elements)
    return {
        "alignment_score": _alignment_score(draft, tol),
        "whitespace_ratio": 1.0 - covered / canvas.area,
        "whitespace_variance": float(np.var(cell_ws)),
        "element_count": n / ELEMENT_COUNT_NORM,
        "fill_rates": [min(1.0, required_height(el, METRICS) / el.geometry.h) for el in text_els],
        "font_sizes": [el.style.font_size for el in text_els],
        "overflow_issue_count": sum(1 for i in crit if i.issue_type == OVERFLOW) / n if n else 0.0,
        "overlap_area_ratio": min(1.0, overlap / canvas.area),
        "color_count": min(1.0, len(colors) / COLOR_COUNT_NORM),
        "bullet_count": sum(len(el.content.bullets) for el in draft.elements if isinstance(el.content, TextBody))
        / BULLET_COUNT_NORM,
    }


def extract_features(
    deck: Sequence[SlideDraft],
    critiques: Sequence[CritiqueList] | None = None,
    thresholds: CriticThresholds = CriticThresholds(),
) -> np.ndarray:
    """Deck-level feature vector (slide means) with a trailing bias entry of 1.

    Text fill rate and font size are averaged over all text-bearing elements
    of the deck rather than per slide, and are 0 when there are none.
    """
    if not deck:
        raise EmptyDeck("cannot extract features from an empty deck")
    if critiques is None:
        critiques = [critique(d, None, thresholds) for d in deck]
    if len(critiques) != len(deck):
        raise LengthMismatch("one critique list per slide is required")
    per = [_slide_features(d, c, thresholds.align_tolerance_px) for d, c in zip(deck, critiques)]
    fills = [v for p in per for v in p["fill_rates"]]
    fonts = [v for p in per for v in p["font_sizes"]]
    mean = lambda key: sum(p[key] for p in per) / len(per)  # noqa: E731
    x = [
        mean("alignment_score"),
        mean("whitespace_ratio"),
        mean("whitespace_variance"),
        mean("element_count"),
        sum(fills) / len(fills) if fills else 0.0,
        mean("overflow_issue_count"),
        mean("overlap_area_ratio"),
        (sum(fonts) / len(fonts)) / FONT_SIZE_NORM if fonts else 0.0,
        mean("color_count"),
        mean("bullet_count"),
        1.0,
    ]
    return np.array(x, dtype=np.float64)


def _as_vector(x: Sequence[float] | np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape == (N_FEATURES,):
        x = np.append(x, 1.0)
    if x.shape != (N_WEIGHTS,):
        raise DimensionMismatch(f"expected {N_FEATURES} features (+ bias), got shape {x.shape}")
    return x


# ---------------------------------------------------------------- scoring


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.where(z >= 0, 1.0 / (1.0 + np.exp(-np.abs(z))), np.exp(-np.abs(z)) / (1.0 + np.exp(-np.abs(z))))
    return float(out) if out.ndim == 0 else out


@dataclass
class DimensionScorer:
    dimension: str
    weights: np.ndarray = field(default_factory=lambda: np.zeros(N_WEIGHTS))
    a: float = 1.0
    b: float = 0.0

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.shape != (N_WEIGHTS,):
            raise DimensionMismatch(f"scorer needs {N_WEIGHTS} weights")
        if not np.all(np.isfinite(self.weights)):
            raise PrevalError("scorer weights must be finite")
        if not self.a > 0:
            raise PrevalError("sigmoid scale a must be positive")

    def raw(self, x) -> float:
        return float(self.weights @ _as_vector(x))

    def normalize(self, raw: float) -> float:
        return sigmoid(self.a * (raw - self.b))

    def to_dict(self) -> dict:
        return {"weights": self.weights.tolist(), "a": self.a, "b": self.b}

    @classmethod
    def from_dict(cls, dimension: str, data: Mapping) -> DimensionScorer:
        return cls(dimension, np.array(data["weights"], dtype=np.float64), float(data["a"]), float(data["b"]))


def score_dimension(scorer: DimensionScorer, x) -> float:
    return scorer.normalize(scorer.raw(x))


@dataclass(frozen=True)
class QualityProfile:
    scores: dict[str, float]
    aggregate: float
    dim_weights: dict[str, float]


def check_dim_weights(dim_weights: Mapping[str, float]) -> None:
    if abs(sum(dim_weights.values()) - 1.0) > 1e-9 or any(w < 0 for w in dim_weights.values()):
        raise WeightSumError(f"dimension weights must be non-negative and sum to 1, got {dict(dim_weights)}")


EQUAL_WEIGHTS = {k: 1.0 / len(DIMENSIONS) for k in DIMENSIONS}


def aggregate_scores(scores: Mapping[str, float], dim_weights: Mapping[str, float]) -> float:
    check_dim_weights(dim_weights)
    return sum(dim_weights[k] * scores[k] for k in dim_weights)


def evaluate_features(x, scorers: Mapping[str, DimensionScorer], dim_weights: Mapping[str, float] = EQUAL_WEIGHTS) -> QualityProfile:
    check_dim_weights(dim_weights)
    scores = {k: score_dimension(scorers[k], x) for k in dim_weights}
    return QualityProfile(scores, aggregate_scores(scores, dim_weights), dict(dim_weights))


def evaluate(
    deck: Sequence[SlideDraft],
    scorers: Mapping[str, DimensionScorer],
    dim_weights: Mapping[str, float] = EQUAL_WEIGHTS,
    critiques: Sequence[CritiqueList] | None = None,
) -> QualityProfile:
    """Features, per-dimension raw scores, sigmoid normalization, weighted sum."""
    check_dim_weights(dim_weights)
    return evaluate_features(extract_features(deck, critiques), scorers, dim_weights)


def default_scorers() -> dict[str, DimensionScorer]:
    """Hand-set scorers for use before any preference data is available."""
    w = {
        # align, ws, ws_var, count, fill, overflow, overlap, font, colors, bullets, bias
        "content": [0.0, -0.5, 0.0, 1.0, 1.0, -2.0, 0.0, 0.5, 0.0, 1.0, 0.0],
        "coherence": [0.5, 0.0, -1.0, 0.0, 0.5, -1.0, -1.0, 0.0, -0.5, 0.5, 0.0],
        "design": [2.0, 0.5, -2.0, -0.5, 0.0, -3.0, -4.0, 0.5, -1.0, -0.5, 0.0],
    }
    return {k: DimensionScorer(k, np.array(v)) for k, v in w.items()}


# ---------------------------------------------------------------- preference losses


@dataclass(frozen=True)
class PreferencePair:
    features_a: np.ndarray
    features_b: np.ndarray
    labels: dict[str, str]
    tags: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "features_a", _as_vector(self.features_a))
        object.__setattr__(self, "features_b", _as_vector(self.features_b))
        missing = set(DIMENSIONS) - set(self.labels)
        if missing:
            raise PrevalError(f"labels missing for {sorted(missing)}")
        for k, v in self.labels.items():
            if v not in LABELS:
                raise PrevalError(f"label for {k} must be one of {LABELS}, got {v!r}")
        unknown = set(self.tags) - set(TAG_VOCAB)
        if unknown:
            raise PrevalError(f"unknown rationale tags {sorted(unknown)}")
        object.__setattr__(self, "tags", frozenset(self.tags))

    def to_dict(self) -> dict:
        return {
            "features_A": self.features_a[:N_FEATURES].tolist(),
            "features_B": self.features_b[:N_FEATURES].tolist(),
            "labels": dict(self.labels),
            "tags": sorted(self.tags),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> PreferencePair:
        return cls(data["features_A"], data["features_B"], dict(data["labels"]), frozenset(data.get("tags", ())))


def _sign(label: str) -> float:
    if label == "tie":
        raise TiePair("ties carry no ranking signal")
    return 1.0 if label == "A_better" else -1.0


def ranking_loss(weights: np.ndarray, pair: PreferencePair, dimension: str) -> float:
    """``ln(1 + exp(-y (s_A - s_B)))`` on raw scores."""
    y = _sign(pair.labels[dimension])
    margin = float(weights @ (pair.features_a - pair.features_b))
    return float(np.logaddexp(0.0, -y * margin))


def ranking_loss_grad(weights: np.ndarray, pair: PreferencePair, dimension: str) -> np.ndarray:
    y = _sign(pair.labels[dimension])
    d = pair.features_a - pair.features_b
    return -y * sigmoid(-y * float(weights @ d)) * d


def tag_input(xa: np.ndarray, xb: np.ndarray) -> np.ndarray:
    d = np.abs(_as_vector(xa) - _as_vector(xb))
    d[-1] = 1.0  # keep the bias slot
    return d


def _tag_targets(tags: Iterable[str]) -> np.ndarray:
    tags = set(tags)
    return np.array([1.0 if t in tags else 0.0 for t in TAG_VOCAB])


def tag_loss(tag_head: np.ndarray, xa, xb, tags: Iterable[str]) -> float:
    """Summed binary cross-entropy over the tag vocabulary, from ``|x_A - x_B|``."""
    z = tag_head @ tag_input(xa, xb)
    y = _tag_targets(tags)
    return float(np.sum(np.logaddexp(0.0, z) - y * z))


def tag_loss_grad(tag_head: np.ndarray, xa, xb, tags: Iterable[str]) -> np.ndarray:
    d = tag_input(xa, xb)
    return np.outer(sigmoid(tag_head @ d) - _tag_targets(tags), d)


def zero_tag_head() -> np.ndarray:
    return np.zeros((len(TAG_VOCAB), N_WEIGHTS))


# ---------------------------------------------------------------- training


def _ranking_terms(data: Sequence[PreferencePair]) -> list[tuple[PreferencePair, str]]:
    return [(p, k) for p in data for k in DIMENSIONS if p.labels[k] != "tie"]


def preference_objective(
    scorers: Mapping[str, DimensionScorer],
    tag_head: np.ndarray,
    data: Sequence[PreferencePair],
    lambda_tag: float,
    alpha_l2: float,
) -> float:
    terms = _ranking_terms(data)
    rank = sum(ranking_loss(scorers[k].weights, p, k) for p, k in terms) / len(terms) if terms else 0.0
    tags = sum(tag_loss(tag_head, p.features_a, p.features_b, p.tags) for p in data) / len(data)
    l2 = sum(float(np.sum(s.weights**2)) for s in scorers.values()) + float(np.sum(tag_head**2))
    return rank + lambda_tag * tags + alpha_l2 * l2


def preference_gradients(
    scorers: Mapping[str, DimensionScorer],
    tag_head: np.ndarray,
    data: Sequence[PreferencePair],
    lambda_tag: float,
    alpha_l2: float,
) -> tuple[dict[str, np.ndarray], np.ndarray]:
    """Gradients of :func:`preference_objective` for each scorer and the tag head."""
    grads = {k: _ranking_grad(scorers, data, k) + 2.0 * alpha_l2 * scorers[k].weights for k in scorers}
    g_tag = 2.0 * alpha_l2 * tag_head
    if lambda_tag:
        acc = sum(tag_loss_grad(tag_head, p.features_a, p.features_b, p.tags) for p in data)
        g_tag = g_tag + lambda_tag * acc / len(data)
    return grads, g_tag


def _ranking_grad(scorers: Mapping[str, DimensionScorer], data: Sequence[PreferencePair], dimension: str) -> np.ndarray:
    terms = _ranking_terms(data)
    g = np.zeros(N_WEIGHTS)
    for p, k in terms:
        if k == dimension:
            g += ranking_loss_grad(scorers[k].weights, p, k)
    return g / len(terms) if terms else g


def _copy_scorers(scorers: Mapping[str, DimensionScorer]) -> dict[str, DimensionScorer]:
    return {k: DimensionScorer(s.dimension, s.weights.copy(), s.a, s.b) for k, s in scorers.items()}


def train_preference(
    scorers: Mapping[str, DimensionScorer],
    tag_head: np.ndarray,
    data: Sequence[PreferencePair],
    lambda_tag: float = 0.1,
    alpha_l2: float = 1e-4,
    steps: int = 300,
    lr: float = 0.5,
    history: list[float] | None = None,
) -> tuple[dict[str, DimensionScorer], np.ndarray]:
    """Full-batch gradient descent on ranking + tag + L2 losses."""
    if not data:
        raise PrevalError("training data must be non-empty")
    scorers = _copy_scorers(scorers)
    tag_head = np.array(tag_head, dtype=np.float64, copy=True)
    for _ in range(steps):
        if history is not None:
            loss = preference_objective(scorers, tag_head, data, lambda_tag, alpha_l2)
            if not math.isfinite(loss):
                raise NonFiniteLoss("preference training diverged")
            history.append(loss)
        grads, g_tag = preference_gradients(scorers, tag_head, data, lambda_tag, alpha_l2)
        for k, s in scorers.items():
            s.weights = s.weights - lr * grads[k]
        tag_head = tag_head - lr * g_tag
        if not all(np.all(np.isfinite(s.weights)) for s in scorers.values()):
            raise NonFiniteLoss("preference training diverged")
    return scorers, tag_head


def train_ranking(
    scorers: Mapping[str, DimensionScorer],
    data: Sequence[PreferencePair],
    alpha_l2: float = 1e-4,
    steps: int = 300,
    lr: float = 0.5,
) -> dict[str, DimensionScorer]:
    """Ranking loss plus L2 only, with no tag head."""
    if not data:
        raise PrevalError("training data must be non-empty")
    scorers = _copy_scorers(scorers)
    for _ in range(steps):
        grads = {k: _ranking_grad(scorers, data, k) + 2.0 * alpha_l2 * scorers[k].weights for k in scorers}
        for k, s in scorers.items():
            s.weights = s.weights - lr * grads[k]
    return scorers


def calibrate(scorer: DimensionScorer, calibration: Sequence) -> DimensionScorer:
    """Fit (a, b) so the 10th/90th raw-score percentiles map to 0.25/0.75."""
    raws = np.array([scorer.raw(x) for x in calibration])
    if raws.size == 0:
        raise PrevalError("calibration set must be non-empty")
    p10, p90 = np.percentile(raws, [10, 90])
    if p90 - p10 <= 0:
        return DimensionScorer(scorer.dimension, scorer.weights.copy(), 1.0, float(p10))
    return DimensionScorer(scorer.dimension, scorer.weights.copy(), 2.0 * math.log(3.0) / float(p90 - p10), float((p10 + p90) / 2))


def pairwise_accuracy(scorers: Mapping[str, DimensionScorer], data: Sequence[PreferencePair]) -> float:
    hits = total = 0
    for p, k in _ranking_terms(data):
        total += 1
        margin = scorers[k].raw(p.features_a) - scorers[k].raw(p.features_b)
        hits += (margin > 0) == (p.labels[k] == "A_better")
    return hits / total if total else math.nan


def synthetic_preferences(
    n: int,
    seed: int = 0,
    true_weights: Mapping[str, np.ndarray] | None = None,
) -> tuple[list[PreferencePair], dict[str, np.ndarray]]:
    """Linearly separable preferences drawn from known generating weights.

    Tag ``i`` is set when feature ``i mod 10`` differs by more than 0.5
    between the two decks, which a linear head on ``|x_A - x_B|`` can learn.
    """
    rng = np.random.default_rng(seed)
    if true_weights is None:
        true_weights = {k: rng.normal(0.0, 1.0, N_FEATURES) for k in DIMENSIONS}
    pairs = []
    while len(pairs) < n:
        xa, xb = rng.uniform(0.0, 1.0, N_FEATURES), rng.uniform(0.0, 1.0, N_FEATURES)
        margins = {k: float(true_weights[k] @ (xa - xb)) for k in DIMENSIONS}
        if any(m == 0.0 for m in margins.values()):
            continue
        labels = {k: "A_better" if m > 0 else "B_better" for k, m in margins.items()}
        diff = np.abs(xa - xb)
        tags = frozenset(t for i, t in enumerate(TAG_VOCAB) if diff[i % N_FEATURES] > 0.5)
        pairs.append(PreferencePair(xa, xb, labels, tags))
    return pairs, dict(true_weights)


# ---------------------------------------------------------------- correlation


def _ratio(num: int, den_sq: int) -> float:
    # num / sqrt(den_sq) with an exact root when den_sq is a perfect square
    if den_sq <= 0:
        return math.nan
    root = math.isqrt(den_sq)
    return num / root if root * root == den_sq else num / math.sqrt(den_sq)


def _doubled_ranks(v: Sequence[float]) -> list[int]:
    """Average ranks times two, so ties stay integral."""
    order = sorted(range(len(v)), key=lambda i: v[i])
    ranks = [0] * len(v)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and v[order[j + 1]] == v[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = i + j + 2
        i = j + 1
    return ranks


def kendall_tau(x: Sequence[float], y: Sequence[float]) -> float:
    """Kendall tau-b from pair counts; exact +-1 for identical or reversed orderings."""
    if len(x) != len(y):
        raise LengthMismatch("rank correlation needs equal-length inputs")
    s = nx = ny = 0
    for i in range(len(x)):
        for j in range(i + 1, len(x)):
            dx = (x[i] > x[j]) - (x[i] < x[j])
            dy = (y[i] > y[j]) - (y[i] < y[j])
            s += dx * dy
            nx += dx != 0
            ny += dy != 0
    return _ratio(s, nx * ny)


def spearman_rho(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation of average ranks, in integer arithmetic."""
    if len(x) != len(y):
        raise LengthMismatch("rank correlation needs equal-length inputs")
    n = len(x)
    rx, ry = _doubled_ranks(x), _doubled_ranks(y)
    sx, sy = sum(rx), sum(ry)
    # n^2 * covariance and variances, all integers
    cov = n * sum(a * b for a, b in zip(rx, ry)) - sx * sy
    vx = n * sum(a * a for a in rx) - sx * sx
    vy = n * sum(b * b for b in ry) - sy * sy
    return _ratio(cov, vx * vy)


def correlation_report(
    profiles: Sequence[QualityProfile],
    human: Sequence[float] | Sequence[Mapping[str, float]],
) -> dict[str, dict[str, float]]:
    """Spearman and Kendall (tau-b) correlation per dimension.

    ``human`` is either one overall score per deck or one mapping per deck
    keyed by dimension name and/or ``"overall"``.
    """
    if len(profiles) != len(human):
        raise LengthMismatch("profiles and human scores differ in length")
    if len(profiles) < 3:
        raise LengthMismatch("at least three decks are needed")
    rows = [h if isinstance(h, Mapping) else {"overall": float(h)} for h in human]
    keys = [k for k in (*DIMENSIONS, "overall") if all(k in r for r in rows)]
    out = {}
    for k in keys:
        model = [p.aggregate if k == "overall" else p.scores[k] for p in profiles]
        ref = [r[k] for r in rows]
        out[k] = {"spearman_rho": spearman_rho(model, ref), "kendall_tau": kendall_tau(model, ref)}
    return out


# ---------------------------------------------------------------- I/O


def save_model(path: str | Path, scorers: Mapping[str, DimensionScorer], tag_head: np.ndarray | None = None) -> None:
    data = {"dimensions": {k: scorers[k].to_dict() for k in DIMENSIONS}}
    if tag_head is not None:
        data["tag_head"] = np.asarray(tag_head).tolist()
    Path(path).write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> tuple[dict[str, DimensionScorer], np.ndarray | None]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    scorers = {k: DimensionScorer.from_dict(k, data["dimensions"][k]) for k in DIMENSIONS}
    head = np.array(data["tag_head"], dtype=np.float64) if "tag_head" in data else None
    return scorers, head


def load_preferences(path: str | Path) -> list[PreferencePair]:
    with open(path, encoding="utf-8") as fh:
        return [PreferencePair.from_dict(json.loads(line)) for line in fh if line.strip()]


def write_preferences(path: str | Path, pairs: Iterable[PreferencePair]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for p in pairs:
            fh.write(json.dumps(p.to_dict()) + "\n")


def write_profile_csv(path: str | Path, rows: Sequence[tuple[str, QualityProfile]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["deck", *DIMENSIONS, "aggregate"])
        for name, prof in rows:
            w.writerow([name, *(f"{prof.scores[k]:.6f}" for k in DIMENSIONS), f"{prof.aggregate:.6f}"])
