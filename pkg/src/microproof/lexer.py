"""Unicode lexer for `.mpl` source.

Identifiers may contain Unicode letters, digits, subscripts, primes and `?`
(for `exact?`); dot-separated qualified names are lexed as a single
identifier path.  Comments: `--` to end of line, `/- ... -/` nestable.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass

from .errors import InvalidCharacter, Span

IDENTIFIER = "identifier"
KEYWORD = "keyword"
SYMBOL = "symbol"
STRINGLIT = "stringLit"
EOF = "eof"

KEYWORDS = {
    "import", "variable", "example", "theorem", "lemma", "def", "axiom",
    "by", "calc", "fun", "have", "attribute",
}

# multi-char symbols, longest first
SYMBOLS = [
    ":=", "=>", "@[", "¬", "∀", "∈", "↔", "∧", "∨", "≠", "=", "•", "+", "*",
    "-", "(", ")", "[", "]", "{", "}", ",", ":", ";", "·", "_", "←",
]

SUBSCRIPTS = "₀₁₂₃₄₅₆₇₈₉ₗᵢⱼ"


def _is_ident_start(ch: str) -> bool:
    if ch == "_":
        return False  # `_` is the calc placeholder symbol
    cat = unicodedata.category(ch)
    return cat.startswith("L") or ch in ("'",)


def _is_ident_char(ch: str) -> bool:
    if ch in SUBSCRIPTS or ch in ("'", "!", "?", "_"):
        return True
    cat = unicodedata.category(ch)
    return cat.startswith("L") or cat.startswith("Nd")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: Span

    @property
    def line(self) -> int:
        return self.span.line


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    n = len(source)
    line = 1
    col = 1

    def advance(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if i < n and source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    def span_from(start: int, start_line: int, start_col: int) -> Span:
        return Span(start, i, start_line, start_col, line, col)

    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        if source.startswith("--", i):
            while i < n and source[i] != "\n":
                advance(1)
            continue
        if source.startswith("/-", i):
            depth = 1
            advance(2)
            while i < n and depth > 0:
                if source.startswith("/-", i):
                    depth += 1
                    advance(2)
                elif source.startswith("-/", i):
                    depth -= 1
                    advance(2)
                else:
                    advance(1)
            continue
        start, sl, sc = i, line, col
        if ch == '"':
            advance(1)
            buf = []
            while i < n and source[i] != '"':
                buf.append(source[i])
                advance(1)
            if i >= n:
                raise InvalidCharacter("unterminated string literal", span_from(start, sl, sc))
            advance(1)
            tokens.append(Token(STRINGLIT, "".join(buf), span_from(start, sl, sc)))
            continue
        # linear-map arrow notation `→ₗ[`
        if source.startswith("→ₗ[", i):
            advance(3)
            tokens.append(Token(SYMBOL, "→ₗ[", span_from(start, sl, sc)))
            continue
        if ch == "→":
            advance(1)
            tokens.append(Token(SYMBOL, "→", span_from(start, sl, sc)))
            continue
        if _is_ident_start(ch):
            advance(1)
            while i < n:
                if _is_ident_char(source[i]):
                    advance(1)
                elif (source[i] == "." and i + 1 < n and _is_ident_start(source[i + 1])):
                    advance(1)  # qualified name path
                else:
                    break
            text = source[start:i]
            kind = KEYWORD if text in KEYWORDS else IDENTIFIER
            tokens.append(Token(kind, text, span_from(start, sl, sc)))
            continue
        if ch.isdigit():
            advance(1)
            while i < n and source[i].isdigit():
                advance(1)
            tokens.append(Token(IDENTIFIER, source[start:i], span_from(start, sl, sc)))
            continue
        for sym in SYMBOLS:
            if source.startswith(sym, i):
                advance(len(sym))
                tokens.append(Token(SYMBOL, sym, span_from(start, sl, sc)))
                break
        else:
            raise InvalidCharacter(f"invalid character {ch!r}", span_from(start, sl, sc))
    tokens.append(Token(EOF, "", Span(n, n, line, col, line, col)))
    return tokens
