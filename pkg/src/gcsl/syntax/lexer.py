"""Tokenizer shared by the contract, OCL and model-guard parsers."""
from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ParseError


@dataclass(frozen=True)
class Token:
    kind: str  # 'num' | 'ident' | 'enum' | 'op' | 'eof'
    value: str
    line: int
    col: int

    def __str__(self):
        return "end of input" if self.kind == "eof" else repr(self.value)


# unicode spellings folded to their ASCII token
_ALIASES = {
    "→": "->", "≤": "<=", "≥": ">=", "≠": "<>", "¬": "not", "∧": "and",
    "∨": "or", "⟹": "implies", "⇒": "implies", "=>": "implies", "∞": "inf",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>--[^\n]*)
  | (?P<num>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<enum>\#[A-Za-z_][A-Za-z0-9_]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|:=|<=|>=|<>|=>|[→≤≥≠¬∧∨⟹⇒∞]|[|.,()\[\]{}<>=+\-*/%:])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        pos = m.end()
        if kind == "nl":
            line, line_start = line + 1, pos
            continue
        if kind in ("ws", "comment"):
            continue
        if kind == "op" and value in _ALIASES:
            value = _ALIASES[value]
            kind = "ident" if value.isalpha() else "op"
        if kind == "enum":
            value = value[1:]
        tokens.append(Token(kind, value, line, col))
    col = pos - line_start + 1
    tokens.append(Token("eof", "", line, col))
    return tokens
