"""LDL token registry.

Ids are assigned in a fixed order: specials, slide types, element types,
attributes, positions (core tier), then the extension tier, then reserved
padding up to ``VOCAB_SIZE``. The order is part of the model file format, so
never reorder existing entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

VOCAB_SIZE = 200

SOS = "<SOS>"
EOS = "<EOS>"
SEP = "<SEP>"


class TokenKind(str, Enum):
    SLIDE_TYPE = "SlideType"
    ELEM_TYPE = "ElemType"
    ATTR = "Attr"
    POS = "Pos"
    SPECIAL = "Special"
    RESERVED = "Reserved"


@dataclass(frozen=True)
class LdlToken:
    kind: TokenKind
    name: str
    id: int
    extension: bool = False

    def __str__(self) -> str:
        return self.name


SPECIAL_TOKENS = (SOS, EOS, SEP)

SLIDE_TYPES = (
    "SLIDE_TITLE",
    "SLIDE_CONTENT_SINGLE_COL",
    "SLIDE_CONTENT_TWO_COL",
    "SLIDE_SECTION_HEADER",
    "SLIDE_IMAGE_CAPTION",
    "SLIDE_BLANK",
)

ELEM_TYPES = (
    "ELEM_TITLE",
    "ELEM_SUBTITLE",
    "ELEM_TEXT_BODY",
    "ELEM_IMAGE",
    "ELEM_CHART",
    "ELEM_TABLE",
    "ELEM_FOOTER",
    "ELEM_HEADER",
)

ATTRS = (
    "ATTR_TEXT_POINTS_FEW",
    "ATTR_TEXT_POINTS_MEDIUM",
    "ATTR_TEXT_POINTS_MANY",
    "ATTR_TEXT_LENGTH_SHORT",
    "ATTR_TEXT_LENGTH_LONG",
    "ATTR_IMAGE_ASPECT_WIDE",
    "ATTR_IMAGE_ASPECT_SQUARE",
    "ATTR_IMAGE_ASPECT_TALL",
    "ATTR_SIZE_PRIMARY",
    "ATTR_SIZE_SECONDARY",
    "ATTR_CONTENT_DENSE",
    "ATTR_CONTENT_SPARSE",
)

POSITIONS = (
    "POS_TOP",
    "POS_MIDDLE",
    "POS_BOTTOM",
    "POS_LEFT",
    "POS_CENTER",
    "POS_RIGHT",
    "POS_FULL_WIDTH",
    "POS_HALF_WIDTH_LEFT",
    "POS_HALF_WIDTH_RIGHT",
    "POS_TOP_LEFT",
    "POS_TOP_RIGHT",
    "POS_BOTTOM_LEFT",
    "POS_BOTTOM_RIGHT",
)

# Tokens that only occur in the worked listings, not in the category lists.
EXT_ELEM_TYPES = ("ELEM_CONTENT_BLOCK", "ELEM_FOOTER_FEATURED")
EXT_ATTRS = (
    "ATTR_STYLE_MODERN_INFOGRAPHIC",
    "ATTR_STYLE_TAG",
    "ATTR_LAYOUT_ICON_LEFT",
    "ATTR_CENTER_IMAGE",
    "ATTR_TEXT_LENGTH_MEDIUM",
)
EXT_POSITIONS = (
    "POS_MIDDLE_LEFT_UPPER",
    "POS_MIDDLE_LEFT_CENTER",
    "POS_MIDDLE_LEFT_LOWER",
    "POS_MIDDLE_RIGHT",
    "POS_MIDDLE_RIGHT_UPPER",
    "POS_MIDDLE_RIGHT_CENTER",
    "POS_MIDDLE_RIGHT_LOWER",
    "POS_CENTER_HORIZONTAL",
    "POS_CENTER_VERTICAL",
    "POS_BOTTOM_MIDDLE_SECTION",
)


class Vocabulary:
    """Bijective name <-> id registry of exactly ``VOCAB_SIZE`` tokens."""

    def __init__(self) -> None:
        tokens: list[LdlToken] = []

        def add(names: tuple[str, ...], kind: TokenKind, extension: bool = False) -> None:
            for name in names:
                tokens.append(LdlToken(kind, name, len(tokens), extension))

        add(SPECIAL_TOKENS, TokenKind.SPECIAL)
        add(SLIDE_TYPES, TokenKind.SLIDE_TYPE)
        add(ELEM_TYPES, TokenKind.ELEM_TYPE)
        add(ATTRS, TokenKind.ATTR)
        add(POSITIONS, TokenKind.POS)
        add(EXT_ELEM_TYPES, TokenKind.ELEM_TYPE, extension=True)
        add(EXT_ATTRS, TokenKind.ATTR, extension=True)
        add(EXT_POSITIONS, TokenKind.POS, extension=True)
        n_defined = len(tokens)
        if n_defined > VOCAB_SIZE:
            raise RuntimeError("vocabulary overflow")
        for i in range(n_defined, VOCAB_SIZE):
            tokens.append(LdlToken(TokenKind.RESERVED, f"<RESERVED_{i:03d}>", i))

        self.tokens: tuple[LdlToken, ...] = tuple(tokens)
        self.n_defined = n_defined
        self._by_name = {t.name: t for t in tokens}

    @property
    def size(self) -> int:
        return len(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, name: object) -> bool:
        return name in self._by_name

    def by_name(self, name: str) -> LdlToken:
        return self._by_name[name]

    def by_id(self, token_id: int) -> LdlToken:
        if not 0 <= token_id < len(self.tokens):
            raise KeyError(token_id)
        return self.tokens[token_id]

    def id(self, name: str) -> int:
        return self._by_name[name].id

    def of_kind(self, kind: TokenKind) -> tuple[LdlToken, ...]:
        return tuple(t for t in self.tokens if t.kind is kind)


VOCAB = Vocabulary()

SOS_ID = VOCAB.id(SOS)
EOS_ID = VOCAB.id(EOS)
SEP_ID = VOCAB.id(SEP)
