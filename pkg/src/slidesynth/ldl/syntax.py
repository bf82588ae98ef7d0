"""Lexer, grammar, parser, validator and canonical serializer for LDL.

Grammar (token kinds)::

    sequence := <SOS> SlideType Attr* ( <SEP> element )* [<SEP>] <EOS>
    element  := ElemType ( Attr | Pos )*

A trailing ``<SEP>`` right before ``<EOS>`` is accepted because the worked
listings terminate every declaration with one; ``ParsedLayout.trailing_sep``
keeps it so serialization round-trips to the same id list.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .vocab import EOS, EOS_ID, SEP, SEP_ID, SOS, SOS_ID, VOCAB, LdlToken, TokenKind

MAX_SEQUENCE_LENGTH = 128


class LdlError(ValueError):
    """Base class for LDL lexing and parsing errors."""


class UnknownToken(LdlError):
    def __init__(self, word: str, offset: int) -> None:
        super().__init__(f"unknown token {word!r} at byte {offset}")
        self.word = word
        self.offset = offset


class UnterminatedComment(LdlError):
    def __init__(self, offset: int) -> None:
        super().__init__(f"unterminated comment starting at byte {offset}")
        self.offset = offset


class GrammarViolation(LdlError):
    def __init__(self, reason: str, position: int) -> None:
        super().__init__(f"{reason} (token {position})")
        self.reason = reason
        self.position = position


@dataclass(frozen=True)
class Violation:
    """One problem found by :func:`validate`. ``code`` is a stable category."""

    code: str
    reason: str
    position: int

    def to_dict(self) -> dict:
        return {"code": self.code, "reason": self.reason, "position": self.position}


# ---------------------------------------------------------------- lexing


def lex(text: str) -> list[LdlToken]:
    """Split LDL text into registered tokens, dropping ``/* ... */`` comments."""
    tokens: list[LdlToken] = []
    n = len(text)
    i = 0

    def byte_offset(idx: int) -> int:
        return len(text[:idx].encode("utf-8"))

    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if text.startswith("/*", i):
            end = text.find("*/", i + 2)
            if end < 0:
                raise UnterminatedComment(byte_offset(i))
            i = end + 2
            continue
        start = i
        while i < n and not text[i].isspace() and not text.startswith("/*", i):
            i += 1
        word = text[start:i]
        if word not in VOCAB or VOCAB.by_name(word).kind is TokenKind.RESERVED:
            raise UnknownToken(word, byte_offset(start))
        tokens.append(VOCAB.by_name(word))
    return tokens


def lex_ids(text: str) -> list[int]:
    return [t.id for t in lex(text)]


# ---------------------------------------------------------------- structures


@dataclass(frozen=True)
class ElementDecl:
    """One ``<SEP>``-delimited element declaration.

    ``modifiers`` keeps attribute and position tokens in source order; the
    ``attrs`` and ``positions`` views partition them by kind.
    """

    elem_type: str
    modifiers: tuple[str, ...] = ()

    @classmethod
    def of(cls, elem_type: str, attrs: tuple[str, ...] | list[str] = (), positions: tuple[str, ...] | list[str] = ()) -> ElementDecl:
        return cls(elem_type, tuple(attrs) + tuple(positions))

    @property
    def attrs(self) -> tuple[str, ...]:
        return tuple(m for m in self.modifiers if VOCAB.by_name(m).kind is TokenKind.ATTR)

    @property
    def positions(self) -> tuple[str, ...]:
        return tuple(m for m in self.modifiers if VOCAB.by_name(m).kind is TokenKind.POS)

    def has(self, attr: str) -> bool:
        return attr in self.modifiers


@dataclass(frozen=True)
class ParsedLayout:
    slide_type: str
    slide_attrs: tuple[str, ...] = ()
    elements: tuple[ElementDecl, ...] = ()
    trailing_sep: bool = False

    def token_names(self) -> list[str]:
        names = [SOS, self.slide_type, *self.slide_attrs]
        for el in self.elements:
            names.append(SEP)
            names.append(el.elem_type)
            names.extend(el.modifiers)
        if self.trailing_sep:
            names.append(SEP)
        names.append(EOS)
        return names

    def token_ids(self) -> list[int]:
        return [VOCAB.id(n) for n in self.token_names()]


# ---------------------------------------------------------------- validation


def _kind(token_id: int) -> TokenKind | None:
    if 0 <= token_id < VOCAB.size:
        return VOCAB.by_id(token_id).kind
    return None


def validate(token_ids: list[int] | tuple[int, ...]) -> list[Violation]:
    """Return every grammar/invariant violation; empty iff :func:`parse` succeeds."""
    ids = list(token_ids)
    out: list[Violation] = []
    if not ids:
        return [Violation("GrammarViolation", "empty sequence", 0)]
    if len(ids) > MAX_SEQUENCE_LENGTH:
        out.append(
            Violation(
                "LengthExceeded",
                f"sequence has {len(ids)} tokens, limit is {MAX_SEQUENCE_LENGTH}",
                MAX_SEQUENCE_LENGTH,
            )
        )
    last = len(ids) - 1
    if ids[0] != SOS_ID:
        out.append(Violation("GrammarViolation", "missing <SOS>", 0))
    if ids[last] != EOS_ID:
        out.append(Violation("GrammarViolation", "missing <EOS>", last))

    # phases: header-type, header, segment-start, segment
    phase = "header-type"
    seen_attrs: set[int] = set()
    for pos, tid in enumerate(ids):
        kind = _kind(tid)
        if kind is None or kind is TokenKind.RESERVED:
            out.append(Violation("UnknownTokenId", f"token id {tid} is not a usable LDL token", pos))
            continue
        if tid == SOS_ID:
            if pos != 0:
                out.append(Violation("GrammarViolation", "duplicate <SOS>", pos))
            continue
        if tid == EOS_ID:
            if pos != last:
                out.append(Violation("GrammarViolation", "<EOS> before end of sequence", pos))
            if phase == "header-type":
                out.append(Violation("GrammarViolation", "slide type absent", pos))
                phase = "header"
            continue
        if phase == "header-type":
            if kind is not TokenKind.SLIDE_TYPE:
                out.append(Violation("GrammarViolation", "slide type absent", pos))
                phase = "header"
                if kind is TokenKind.ELEM_TYPE:
                    phase, seen_attrs = "segment", set()
                    continue
                if tid == SEP_ID:
                    phase = "segment-start"
                    continue
            else:
                phase = "header"
                continue
        if tid == SEP_ID:
            if phase == "segment-start":
                out.append(Violation("GrammarViolation", "empty element declaration", pos))
            phase = "segment-start"
            continue
        if kind is TokenKind.SLIDE_TYPE:
            reason = "duplicate slide type" if phase == "header" else "slide type inside element declaration"
            out.append(Violation("GrammarViolation", reason, pos))
            continue
        if phase == "header":
            if kind is TokenKind.ATTR:
                if tid in seen_attrs:
                    out.append(Violation("GrammarViolation", "duplicate attribute", pos))
                seen_attrs.add(tid)
            elif kind is TokenKind.POS:
                out.append(Violation("GrammarViolation", "position token in slide header", pos))
            else:
                out.append(Violation("GrammarViolation", "element type before <SEP>", pos))
            continue
        if phase == "segment-start":
            if kind is not TokenKind.ELEM_TYPE:
                out.append(
                    Violation("GrammarViolation", "element declaration must start with an element type", pos)
                )
            phase, seen_attrs = "segment", set()
            if kind is TokenKind.ATTR:
                seen_attrs.add(tid)
            continue
        # phase == "segment"
        if kind is TokenKind.ELEM_TYPE:
            out.append(Violation("GrammarViolation", "second element type in one declaration", pos))
        elif kind is TokenKind.ATTR:
            if tid in seen_attrs:
                out.append(Violation("GrammarViolation", "duplicate attribute", pos))
            seen_attrs.add(tid)
    out.sort(key=lambda v: v.position)
    return out


def parse(tokens: list[LdlToken] | list[int] | tuple) -> ParsedLayout:
    """Build a :class:`ParsedLayout`, raising the first violation as an error."""
    ids = [t.id if isinstance(t, LdlToken) else int(t) for t in tokens]
    problems = validate(ids)
    if problems:
        first = problems[0]
        raise GrammarViolation(first.reason, first.position)

    names = [VOCAB.by_id(i).name for i in ids[1:-1]]
    segments: list[list[str]] = [[]]
    for name in names:
        if name == SEP:
            segments.append([])
        else:
            segments[-1].append(name)
    header, *rest = segments
    trailing = bool(rest) and not rest[-1]
    if trailing:
        rest = rest[:-1]
    elements = tuple(ElementDecl(seg[0], tuple(seg[1:])) for seg in rest)
    return ParsedLayout(header[0], tuple(header[1:]), elements, trailing)


def parse_text(text: str) -> ParsedLayout:
    return parse(lex(text))


def serialize(layout: ParsedLayout) -> str:
    """Canonical text: single spaces, one declaration per line, no comments."""
    lines = [" ".join([SOS, layout.slide_type, *layout.slide_attrs])]
    for el in layout.elements:
        lines.append(" ".join([el.elem_type, *el.modifiers]))
    text = " <SEP>\n".join(lines)
    if layout.trailing_sep:
        text += " <SEP>"
    return text + " <EOS>"


# ---------------------------------------------------------------- decoding support


@dataclass(frozen=True)
class GrammarCursor:
    """Incremental grammar state used to mask decoder continuations."""

    phase: str = "start"
    used_attrs: frozenset[int] = field(default_factory=frozenset)
    length: int = 0

    def advance(self, token_id: int) -> GrammarCursor:
        kind = VOCAB.by_id(token_id).kind
        n = self.length + 1
        if token_id == SOS_ID:
            return GrammarCursor("header-type", frozenset(), n)
        if token_id == EOS_ID:
            return GrammarCursor("done", frozenset(), n)
        if token_id == SEP_ID:
            return GrammarCursor("segment-start", frozenset(), n)
        if kind is TokenKind.SLIDE_TYPE:
            return GrammarCursor("header", frozenset(), n)
        if kind is TokenKind.ELEM_TYPE:
            return GrammarCursor("segment", frozenset(), n)
        used = self.used_attrs | {token_id} if kind is TokenKind.ATTR else self.used_attrs
        return GrammarCursor(self.phase, used, n)

    def allowed(self, max_len: int = MAX_SEQUENCE_LENGTH) -> list[int]:
        """Token ids that keep the prefix completable within ``max_len``."""
        if self.phase == "done":
            return []
        if self.phase == "start":
            return [SOS_ID]
        room = max_len - self.length  # tokens we may still emit
        if self.phase == "header-type":
            # need the slide type now and <EOS> afterwards
            return [t.id for t in _SLIDE_TYPES] if room >= 2 else []
        can_end = [EOS_ID]
        if room <= 1:
            return can_end
        if self.phase == "segment-start":
            return sorted([EOS_ID] + [t.id for t in _ELEM_TYPES])
        out = [EOS_ID, SEP_ID]
        out.extend(t.id for t in _ATTRS if t.id not in self.used_attrs)
        if self.phase == "segment":
            out.extend(t.id for t in _POSITIONS)
        return sorted(out)


_SLIDE_TYPES = VOCAB.of_kind(TokenKind.SLIDE_TYPE)
_ELEM_TYPES = VOCAB.of_kind(TokenKind.ELEM_TYPE)
_ATTRS = VOCAB.of_kind(TokenKind.ATTR)
_POSITIONS = VOCAB.of_kind(TokenKind.POS)


# ---------------------------------------------------------------- position lint

_HORIZONTAL = {
    "POS_LEFT": "left",
    "POS_HALF_WIDTH_LEFT": "left",
    "POS_TOP_LEFT": "left",
    "POS_BOTTOM_LEFT": "left",
    "POS_MIDDLE_LEFT_UPPER": "left",
    "POS_MIDDLE_LEFT_CENTER": "left",
    "POS_MIDDLE_LEFT_LOWER": "left",
    "POS_RIGHT": "right",
    "POS_HALF_WIDTH_RIGHT": "right",
    "POS_TOP_RIGHT": "right",
    "POS_BOTTOM_RIGHT": "right",
    "POS_MIDDLE_RIGHT": "right",
    "POS_MIDDLE_RIGHT_UPPER": "right",
    "POS_MIDDLE_RIGHT_CENTER": "right",
    "POS_MIDDLE_RIGHT_LOWER": "right",
    "POS_CENTER": "center",
    "POS_CENTER_HORIZONTAL": "center",
    "POS_FULL_WIDTH": "full",
}
_VERTICAL = {
    "POS_TOP": "top",
    "POS_TOP_LEFT": "top",
    "POS_TOP_RIGHT": "top",
    "POS_MIDDLE": "middle",
    "POS_CENTER_VERTICAL": "middle",
    "POS_MIDDLE_RIGHT": "middle",
    "POS_BOTTOM": "bottom",
    "POS_BOTTOM_LEFT": "bottom",
    "POS_BOTTOM_RIGHT": "bottom",
}


def position_conflicts(layout: ParsedLayout) -> list[str]:
    """Warnings for declarations naming two different columns or bands."""
    warnings = []
    for idx, el in enumerate(layout.elements):
        for axis, table in (("horizontal", _HORIZONTAL), ("vertical", _VERTICAL)):
            named = {table[p] for p in el.positions if p in table}
            if len(named) > 1:
                warnings.append(
                    f"element {idx} ({el.elem_type}): conflicting {axis} positions {sorted(named)}"
                )
    return warnings
