"""Layout Description Language: vocabulary, lexer, parser, validator."""

from .syntax import (
    MAX_SEQUENCE_LENGTH,
    ElementDecl,
    GrammarCursor,
    GrammarViolation,
    LdlError,
    ParsedLayout,
    UnknownToken,
    UnterminatedComment,
    Violation,
    lex,
    lex_ids,
    parse,
    parse_text,
    position_conflicts,
    serialize,
    validate,
)
from .vocab import EOS, EOS_ID, SEP, SEP_ID, SOS, SOS_ID, VOCAB, VOCAB_SIZE, LdlToken, TokenKind, Vocabulary

__all__ = [
    "EOS",
    "EOS_ID",
    "MAX_SEQUENCE_LENGTH",
    "SEP",
    "SEP_ID",
    "SOS",
    "SOS_ID",
    "VOCAB",
    "VOCAB_SIZE",
    "ElementDecl",
    "GrammarCursor",
    "GrammarViolation",
    "LdlError",
    "LdlToken",
    "ParsedLayout",
    "TokenKind",
    "UnknownToken",
    "UnterminatedComment",
    "Violation",
    "Vocabulary",
    "lex",
    "lex_ids",
    "parse",
    "parse_text",
    "position_conflicts",
    "serialize",
    "validate",
]
