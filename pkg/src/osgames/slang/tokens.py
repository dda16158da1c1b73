"""Lexer for SLANG, the strategy language player programs are written in.

Tokens carry exact spans into the original text: the lexeme of every token
equals the source slice at its span, spans are ordered and non-overlapping,
and the gaps between consecutive tokens contain only whitespace.  Comments
(`#` to end of line) are emitted as tokens so source transforms can remove
them without disturbing anything else.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

#: Hard cap on accepted program size (bytes of UTF-8).
MAX_SOURCE_BYTES = 64 * 1024

KEYWORDS = frozenset(
    {
        "fn", "let", "if", "elif", "else", "while", "for", "in",
        "return", "and", "or", "not", "true", "false",
    }
)

#: Multi-character operators first so maximal munch works by scanning in order.
OPERATORS = ("==", "!=", "<=", ">=", "<", ">", "+", "-", "*", "/", "%", "=")

DELIMITERS = "(){}[],"


class TokenKind(Enum):
    KEYWORD = "keyword"
    IDENT = "identifier"
    INT = "integer-literal"
    STRING = "string-literal"
    OP = "operator"
    DELIM = "delimiter"
    COMMENT = "comment"


@dataclass(frozen=True)
class Span:
    start: int
    end: int

    def slice(self, text: str) -> str:
        return text[self.start : self.end]


@dataclass(frozen=True)
class SourceText:
    text: str
    origin: str = "<memory>"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    span: Span
    line: int  # 1-based line number of the token's first character


class LexError(Exception):
    def __init__(self, message: str, span: Span):
        super().__init__(message)
        self.message = message
        self.span = span


def line_col(text: str, offset: int) -> tuple[int, int]:
    """1-based (line, column) of an offset; handy for diagnostics."""
    line = text.count("\n", 0, offset) + 1
    last_nl = text.rfind("\n", 0, offset)
    return line, offset - last_nl


def _is_ident_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def tokenize(src: SourceText | str, max_bytes: int = MAX_SOURCE_BYTES) -> list[Token]:
    """Tokenize SLANG source, raising LexError on the first problem."""
    text = src.text if isinstance(src, SourceText) else src
    if len(text.encode("utf-8")) > max_bytes:
        raise LexError(
            f"source exceeds the {max_bytes} byte cap", Span(0, len(text))
        )

    tokens: list[Token] = []
    i = 0
    line = 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            continue
        start = i
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            tokens.append(Token(TokenKind.COMMENT, text[start:i], Span(start, i), line))
            continue
        if _is_ident_start(ch):
            while i < n and _is_ident_char(text[i]):
                i += 1
            lexeme = text[start:i]
            kind = TokenKind.KEYWORD if lexeme in KEYWORDS else TokenKind.IDENT
            tokens.append(Token(kind, lexeme, Span(start, i), line))
            continue
        if ch.isdigit():
            while i < n and text[i].isdigit():
                i += 1
            tokens.append(Token(TokenKind.INT, text[start:i], Span(start, i), line))
            continue
        if ch == '"':
            i += 1
            while i < n and text[i] not in ('"', "\n"):
                if text[i] == "\\":
                    i += 1  # skip the escaped character (checked by the parser)
                i += 1
            if i >= n or text[i] != '"':
                raise LexError("unterminated string", Span(start, min(i, n)))
            i += 1
            tokens.append(Token(TokenKind.STRING, text[start:i], Span(start, i), line))
            continue
        matched = False
        for op in OPERATORS:
            if text.startswith(op, i):
                i += len(op)
                tokens.append(Token(TokenKind.OP, op, Span(start, i), line))
                matched = True
                break
        if matched:
            continue
        if ch in DELIMITERS:
            i += 1
            tokens.append(Token(TokenKind.DELIM, ch, Span(start, i), line))
            continue
        raise LexError(f"illegal character {ch!r}", Span(start, start + 1))
    return tokens
