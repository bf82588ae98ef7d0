"""Layout prototype generation from slide-concept features.

Two routes produce an LDL sequence:

* :func:`rule_prototype` -- a fixed template per functional type;
* :class:`LpgModel` -- a conditional first-order token table trained by
  gradient descent on ``mean NLL + l2_coeff * ||theta||^2`` and decoded with
  grammar-masked, length-normalized beam search.
"""

from __future__ import annotations

import json
import logging
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .concepts import FUNCTIONAL_TYPES, SlideConcept
from .ldl import EOS_ID, MAX_SEQUENCE_LENGTH, SOS_ID, VOCAB, VOCAB_SIZE, GrammarCursor, lex_ids, parse, validate
from .ldl.vocab import EOS, SEP, SOS

log = logging.getLogger(__name__)

POINTS_BUCKETS = ("few", "medium", "many")
ASPECT_BUCKETS = ("wide", "square", "tall", "none")
N_CONDITIONS = len(FUNCTIONAL_TYPES) * 12
DEFAULT_L2 = 1e-4
DEFAULT_BEAM = 5


class DecodeFailure(RuntimeError):
    pass


class NonFiniteLoss(FloatingPointError):
    pass


# ---------------------------------------------------------------- features


@dataclass(frozen=True)
class ConceptFeatures:
    functional_type: int
    points_bucket: str = "few"
    aspect_bucket: str = "none"

    def __post_init__(self) -> None:
        if not 0 <= self.functional_type < len(FUNCTIONAL_TYPES):
            raise ValueError(f"functional type index {self.functional_type} out of range")
        if self.points_bucket not in POINTS_BUCKETS:
            raise ValueError(f"points bucket must be one of {POINTS_BUCKETS}")
        if self.aspect_bucket not in ASPECT_BUCKETS:
            raise ValueError(f"aspect bucket must be one of {ASPECT_BUCKETS}")

    @classmethod
    def of(cls, functional_type: str, points: str = "few", aspect: str = "none") -> ConceptFeatures:
        return cls(FUNCTIONAL_TYPES.index(functional_type), points, aspect)

    @property
    def type_name(self) -> str:
        return FUNCTIONAL_TYPES[self.functional_type]

    @property
    def condition(self) -> int:
        return self.functional_type * 12 + POINTS_BUCKETS.index(self.points_bucket) * 4 + ASPECT_BUCKETS.index(self.aspect_bucket)

    def to_dict(self) -> dict:
        return {"functional_type": self.type_name, "points": self.points_bucket, "aspect": self.aspect_bucket}

    @classmethod
    def from_dict(cls, data: dict) -> ConceptFeatures:
        ft = data["functional_type"]
        idx = ft if isinstance(ft, int) else FUNCTIONAL_TYPES.index(ft)
        return cls(idx, data.get("points", "few"), data.get("aspect", "none"))


def points_bucket(n_bullets: int) -> str:
    if n_bullets <= 3:
        return "few"
    return "medium" if n_bullets <= 6 else "many"


def aspect_bucket(aspect: float | None, has_visual: bool = True) -> str:
    if not has_visual:
        return "none"
    if aspect is None:
        return "square"
    if aspect > 1.2:
        return "wide"
    return "tall" if aspect < 1 / 1.2 else "square"


def encode_concept(concept: SlideConcept) -> ConceptFeatures:
    return ConceptFeatures(
        FUNCTIONAL_TYPES.index(concept.functional_type),
        points_bucket(len(concept.bullet_points)),
        aspect_bucket(concept.primary_visual_aspect, concept.primary_visual_id is not None),
    )


# ---------------------------------------------------------------- rule templates

# {P} expands to the points attribute; {A} to the aspect attribute (or nothing).
TEMPLATES: dict[str, tuple[str, list[str]]] = {
    "title_main": (
        "SLIDE_TITLE",
        ["ELEM_TITLE ATTR_SIZE_PRIMARY POS_TOP POS_CENTER", "ELEM_SUBTITLE ATTR_SIZE_SECONDARY POS_MIDDLE POS_CENTER"],
    ),
    "agenda": ("SLIDE_CONTENT_SINGLE_COL", ["ELEM_TITLE POS_TOP POS_CENTER", "ELEM_TEXT_BODY {P} POS_MIDDLE POS_FULL_WIDTH"]),
    "section_header": ("SLIDE_SECTION_HEADER", ["ELEM_TITLE ATTR_SIZE_PRIMARY POS_MIDDLE POS_CENTER"]),
    "content_text_only": (
        "SLIDE_CONTENT_SINGLE_COL",
        ["ELEM_TITLE POS_TOP POS_CENTER", "ELEM_TEXT_BODY {P} POS_MIDDLE POS_FULL_WIDTH"],
    ),
    "content_text_image_left": (
        "SLIDE_CONTENT_TWO_COL",
        ["ELEM_TITLE POS_TOP POS_CENTER", "ELEM_IMAGE {A} POS_HALF_WIDTH_LEFT", "ELEM_TEXT_BODY {P} POS_HALF_WIDTH_RIGHT"],
    ),
    "content_text_image_right": (
        "SLIDE_CONTENT_TWO_COL",
        ["ELEM_TITLE POS_TOP POS_CENTER", "ELEM_TEXT_BODY {P} POS_HALF_WIDTH_LEFT", "ELEM_IMAGE {A} POS_HALF_WIDTH_RIGHT"],
    ),
    "content_image_only": (
        "SLIDE_IMAGE_CAPTION",
        ["ELEM_TITLE POS_TOP POS_CENTER", "ELEM_IMAGE {A} ATTR_SIZE_PRIMARY POS_MIDDLE POS_CENTER"],
    ),
    "comparison_table": (
        "SLIDE_CONTENT_TWO_COL",
        [
            "ELEM_TITLE POS_TOP POS_CENTER",
            "ELEM_TEXT_BODY {P} POS_HALF_WIDTH_LEFT",
            "ELEM_TEXT_BODY {P} POS_HALF_WIDTH_RIGHT",
        ],
    ),
    "key_takeaways": (
        "SLIDE_CONTENT_SINGLE_COL",
        ["ELEM_TITLE POS_TOP POS_CENTER", "ELEM_TEXT_BODY {P} ATTR_SIZE_PRIMARY POS_MIDDLE POS_FULL_WIDTH"],
    ),
    "thank_you_contact": (
        "SLIDE_TITLE",
        ["ELEM_TITLE ATTR_SIZE_PRIMARY POS_MIDDLE POS_CENTER", "ELEM_FOOTER POS_BOTTOM POS_CENTER"],
    ),
}

_POINTS_ATTR = {"few": "ATTR_TEXT_POINTS_FEW", "medium": "ATTR_TEXT_POINTS_MEDIUM", "many": "ATTR_TEXT_POINTS_MANY"}
_ASPECT_ATTR = {
    "wide": "ATTR_IMAGE_ASPECT_WIDE",
    "square": "ATTR_IMAGE_ASPECT_SQUARE",
    "tall": "ATTR_IMAGE_ASPECT_TALL",
    "none": "",
}


def rule_prototype_text(features: ConceptFeatures) -> str:
    slide_type, decls = TEMPLATES[features.type_name]
    p, a = _POINTS_ATTR[features.points_bucket], _ASPECT_ATTR[features.aspect_bucket]
    parts = [f"{SOS} {slide_type}"]
    parts += [" ".join(d.replace("{P}", p).replace("{A}", a).split()) for d in decls]
    return f" {SEP} ".join(parts) + f" {EOS}"


def rule_prototype(features: ConceptFeatures) -> list[int]:
    return lex_ids(rule_prototype_text(features))


def ids_to_text(ids: Iterable[int]) -> str:
    return " ".join(VOCAB.by_id(i).name for i in ids)


# ---------------------------------------------------------------- model


@dataclass(frozen=True)
class TrainingPair:
    features: ConceptFeatures
    target: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "target", tuple(self.target))
        problems = validate(self.target)
        if problems:
            raise ValueError(f"training target is not valid LDL: {problems[0].reason}")

    @classmethod
    def from_text(cls, features: ConceptFeatures, text: str) -> TrainingPair:
        return cls(features, tuple(lex_ids(text)))


def _log_softmax(row: np.ndarray) -> np.ndarray:
    m = row.max(axis=-1, keepdims=True)
    return row - m - np.log(np.exp(row - m).sum(axis=-1, keepdims=True))


class LpgModel:
    """Token table ``logits[condition, previous token, next token]``."""

    def __init__(self, logits: np.ndarray | None = None, l2_coeff: float = DEFAULT_L2) -> None:
        if logits is None:
            logits = np.zeros((N_CONDITIONS, VOCAB_SIZE, VOCAB_SIZE))
        logits = np.asarray(logits, dtype=np.float64)
        if logits.shape != (N_CONDITIONS, VOCAB_SIZE, VOCAB_SIZE):
            raise ValueError(f"logits must have shape {(N_CONDITIONS, VOCAB_SIZE, VOCAB_SIZE)}")
        if not np.all(np.isfinite(logits)):
            raise ValueError("logits must be finite")
        self.logits = logits
        self.l2_coeff = float(l2_coeff)

    @classmethod
    def random(cls, seed: int = 0, scale: float = 1.0, l2_coeff: float = DEFAULT_L2) -> LpgModel:
        rng = np.random.default_rng(seed)
        return cls(rng.normal(0.0, scale, (N_CONDITIONS, VOCAB_SIZE, VOCAB_SIZE)), l2_coeff)

    def copy(self) -> LpgModel:
        return LpgModel(self.logits.copy(), self.l2_coeff)

    def log_probs(self, condition: int, prev: int) -> np.ndarray:
        return _log_softmax(self.logits[condition, prev])

    # -- persistence -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "l2_coeff": self.l2_coeff,
            "conditions": N_CONDITIONS,
            "vocab": VOCAB_SIZE,
            "logits": self.logits.tolist(),
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> LpgModel:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if data.get("conditions") != N_CONDITIONS or data.get("vocab") != VOCAB_SIZE:
            raise ValueError("model file dimensions do not match this build")
        return cls(np.array(data["logits"], dtype=np.float64), data.get("l2_coeff", DEFAULT_L2))


def nll(model: LpgModel, pair: TrainingPair) -> float:
    """``-sum_t log p(l_t | l_{t-1}, f)`` over every position after ``<SOS>``."""
    c = pair.features.condition
    seq = pair.target
    prev = np.array(seq[:-1])
    nxt = np.array(seq[1:])
    rows = model.logits[c, prev]
    lp = _log_softmax(rows)
    return float(-lp[np.arange(len(nxt)), nxt].sum())


def objective(model: LpgModel, data: Sequence[TrainingPair]) -> float:
    return sum(nll(model, p) for p in data) / len(data) + model.l2_coeff * float(np.sum(model.logits**2))


def objective_grad(model: LpgModel, data: Sequence[TrainingPair]) -> np.ndarray:
    """Gradient of :func:`objective` with respect to the logits table."""
    grad = 2.0 * model.l2_coeff * model.logits
    scale = 1.0 / len(data)
    for pair in data:
        c = pair.features.condition
        prev = np.array(pair.target[:-1])
        nxt = np.array(pair.target[1:])
        probs = np.exp(_log_softmax(model.logits[c, prev]))
        probs[np.arange(len(nxt)), nxt] -= 1.0
        np.add.at(grad[c], prev, scale * probs)
    return grad


def train(
    model: LpgModel,
    data: Sequence[TrainingPair],
    steps: int = 500,
    lr: float = 0.5,
    history: list[float] | None = None,
) -> LpgModel:
    """Full-batch gradient descent on :func:`objective`. Returns a new model.

    The L2 term only rescales the table, so it is applied as a running scalar
    and the dense table is touched just on the rows the data uses. ``history``
    receives the objective before each step.
    """
    if not data:
        raise ValueError("training data must be non-empty")
    raw = model.logits.copy()
    scale = 1.0
    decay = 1.0 - 2.0 * lr * model.l2_coeff
    if decay <= 0:
        raise NonFiniteLoss("learning rate too large for the L2 coefficient")
    rows = sorted({(p.features.condition, prev) for p in data for prev in p.target[:-1]})
    rc = np.array([r[0] for r in rows], dtype=np.intp)
    rp = np.array([r[1] for r in rows], dtype=np.intp)
    row_of = {r: i for i, r in enumerate(rows)}
    # per pair: row index of each predicted position, and the target token
    index = [
        (np.array([row_of[(p.features.condition, prev)] for prev in p.target[:-1]]), np.array(p.target[1:]))
        for p in data
    ]
    other_sq = float(np.sum(raw**2)) - float(np.sum(raw[rc, rp] ** 2))
    n = len(data)

    for _ in range(steps):
        block = scale * raw[rc, rp]
        lp = _log_softmax(block)
        grad = np.zeros_like(block)
        loss = 0.0
        for ri, nxt in index:
            loss -= lp[ri, nxt].sum()
            g = np.exp(lp[ri])
            g[np.arange(len(nxt)), nxt] -= 1.0
            np.add.at(grad, ri, g)
        if history is not None:
            sq = scale * scale * (other_sq + float(np.sum(raw[rc, rp] ** 2)))
            history.append(float(loss) / n + model.l2_coeff * sq)
            if not math.isfinite(history[-1]):
                raise NonFiniteLoss("training diverged")
        # theta <- decay * theta - lr * grad_data, stored as scale * raw
        scale *= decay
        raw[rc, rp] -= (lr / n) * grad / scale
        if not np.all(np.isfinite(raw[rc, rp])):
            raise NonFiniteLoss("training diverged")
    return LpgModel(scale * raw, model.l2_coeff)


# ---------------------------------------------------------------- decoding


def greedy_decode(model: LpgModel, features: ConceptFeatures, max_len: int = MAX_SEQUENCE_LENGTH) -> list[int]:
    c = features.condition
    seq = [SOS_ID]
    cursor = GrammarCursor().advance(SOS_ID)
    while seq[-1] != EOS_ID:
        allowed = cursor.allowed(max_len)
        if not allowed:
            raise DecodeFailure("no grammatical continuation")
        lp = model.log_probs(c, seq[-1])
        best = max(allowed, key=lambda t: (lp[t], -t))
        seq.append(best)
        cursor = cursor.advance(best)
    return seq


def _beam_search(model: LpgModel, features: ConceptFeatures, beam_size: int, max_len: int) -> list[int]:
    """Keep the ``beam_size`` best prefixes; a prefix ending in ``<EOS>`` retires.

    Search runs until no live prefix remains (the grammar mask forces
    ``<EOS>`` at ``max_len``), then the finished sequence with the best mean
    log-probability per predicted token wins. Ties go to the smaller id list.
    """
    c = features.condition
    live: list[tuple[list[int], float, GrammarCursor]] = [([SOS_ID], 0.0, GrammarCursor().advance(SOS_ID))]
    finished: list[tuple[list[int], float]] = []
    while live:
        candidates = []
        for k, (ids, score, cursor) in enumerate(live):
            allowed = cursor.allowed(max_len)
            lp = model.log_probs(c, ids[-1])
            candidates.extend((score + float(lp[t]), k, t) for t in allowed)
        if not candidates:
            break
        # equal-length prefixes: raw score ranks like the normalized one
        candidates.sort(key=lambda x: (-x[0], live[x[1]][0], x[2]))
        nxt = []
        for score, k, t in candidates[:beam_size]:
            ids, _, cursor = live[k]
            if t == EOS_ID:
                finished.append((ids + [t], score))
            else:
                nxt.append((ids + [t], score, cursor.advance(t)))
        live = nxt
    if not finished:
        raise DecodeFailure(f"no complete sequence within {max_len} tokens")
    best = min(finished, key=lambda f: (-f[1] / (len(f[0]) - 1), f[0]))
    return best[0]


def decode(
    model: LpgModel,
    features: ConceptFeatures,
    beam_size: int = DEFAULT_BEAM,
    max_len: int = MAX_SEQUENCE_LENGTH,
) -> list[int]:
    """Grammar-masked beam search; falls back to the rule template on failure."""
    if beam_size < 1:
        raise ValueError("beam_size must be >= 1")
    try:
        return _beam_search(model, features, beam_size, max_len)
    except DecodeFailure as exc:
        warnings.warn(f"decode failed ({exc}); using rule prototype", RuntimeWarning, stacklevel=2)
        return rule_prototype(features)


def generate_prototype(concept: SlideConcept, model: LpgModel | None = None, beam_size: int = DEFAULT_BEAM):
    """Prototype for one concept: beam search when a model is given, the rule table otherwise."""
    features = encode_concept(concept)
    ids = decode(model, features, beam_size) if model is not None else rule_prototype(features)
    return parse(ids)


def load_corpus(path: str | Path) -> list[TrainingPair]:
    """JSONL of ``{"features": {...}, "target": "<SOS> ... <EOS>"}``."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rec = json.loads(line)
                pairs.append(TrainingPair.from_text(ConceptFeatures.from_dict(rec["features"]), rec["target"]))
    return pairs
