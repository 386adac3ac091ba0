"""Tokenizer shared by the predicate language and the graph/schema DSL."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from decimal import Decimal
from typing import Iterable


@dataclass(frozen=True)
class SourceSpan:
    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __post_init__(self) -> None:
        if (self.start_line, self.start_col) > (self.end_line, self.end_col):
            raise ValueError("span start lies after its end")

    def __str__(self) -> str:
        return f"{self.file}:{self.start_line}:{self.start_col}"

    def to(self, other: SourceSpan) -> SourceSpan:
        return SourceSpan(self.file, self.start_line, self.start_col, other.end_line, other.end_col)


class ParseError(Exception):
    """Syntax error with a position and the set of tokens that would have fit."""

    def __init__(self, message: str, span: SourceSpan, expected: Iterable[str] = ()):
        self.span = span
        self.expected = frozenset(expected)
        self.line = span.start_line
        self.column = span.start_col
        if self.expected:
            message = f"{message}; expected {', '.join(sorted(self.expected))}"
        super().__init__(message)
        self.message = message


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "string", "number", "punct" or "eof"
    text: str
    span: SourceSpan
    value: object = None

    def describe(self) -> str:
        if self.kind == "eof":
            return "end of input"
        return repr(self.text)


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<number>-?[0-9]+(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>->|!=|<=|>=|[{}():;,=<>])
    """,
    re.VERBOSE,
)


def tokenize(source: str, file: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line, col = 1, 1
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            span = SourceSpan(file, line, col, line, col + 1)
            if source[pos] == '"':
                raise ParseError("unterminated string literal", span)
            raise ParseError(f"unexpected character {source[pos]!r}", span)
        text = m.group()
        kind = m.lastgroup
        newlines = text.count("\n")
        if newlines:
            end_line = line + newlines
            end_col = len(text) - text.rfind("\n")
        else:
            end_line, end_col = line, col + len(text)
        if kind not in ("ws", "comment"):
            span = SourceSpan(file, line, col, end_line, end_col)
            value: object = None
            if kind == "string":
                try:
                    value = json.loads(text)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"bad string escape: {exc.msg}", span) from None
            elif kind == "number":
                if any(c in text for c in ".eE"):
                    value = Decimal(text)
                else:
                    value = int(text)
            tokens.append(Token(kind, text, span, value))
        pos = m.end()
        line, col = end_line, end_col
    tokens.append(Token("eof", "", SourceSpan(file, line, col, line, col)))
    return tokens


class TokenStream:
    """Cursor over a token list with expectation helpers for recursive descent."""

    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    @classmethod
    def from_source(cls, source: str, file: str = "<input>") -> TokenStream:
        return cls(tokenize(source, file))

    def peek(self, offset: int = 0) -> Token:
        i = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "eof":
            self.pos += 1
        return tok

    @property
    def previous(self) -> Token:
        return self.tokens[max(self.pos - 1, 0)]

    def at(self, *texts: str) -> bool:
        tok = self.peek()
        return tok.kind in ("punct", "ident") and tok.text in texts

    def accept(self, text: str) -> Token | None:
        if self.at(text):
            return self.next()
        return None

    def expect(self, text: str) -> Token:
        if self.at(text):
            return self.next()
        raise self.error(f"unexpected {self.peek().describe()}", [repr(text)])

    def expect_ident(self, what: str = "identifier") -> Token:
        tok = self.peek()
        if tok.kind == "ident":
            return self.next()
        raise self.error(f"unexpected {tok.describe()}", [what])

    def error(self, message: str, expected: Iterable[str] = ()) -> ParseError:
        return ParseError(message, self.peek().span, expected)
