import re
from dataclasses import dataclass
from typing import List, Union
from ..errors import ParseError


KEYWORDS = frozenset(
    ["scm", "noise", "var", "if", "then", "else", "and", "or", "not", "table"]
)
ALIASES = {"≠": "!=", "≤": "<="}

IDENT = "identifier"
INT = "integer"
EOF = "end of input"

_TOKEN = re.compile(
    r"(?P<space>[ \t\n]+)"
    r"|(?P<comment>\#[^\n]*)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<int>[0-9]+)"
    r"|(?P<symbol>->|!=|<=|≠|≤|[{}(),:~=<+\-*/])"
)


@dataclass(frozen=True)
class SourceSpan:
    """Byte offsets [begin, end) into the UTF-8 source, 1-based line/column."""

    begin: int
    end: int
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan

    def describe(self) -> str:
        if self.kind == EOF:
            return EOF
        return repr(self.text)


def normalize(source: Union[str, bytes]) -> str:
    """Decode UTF-8 and turn CRLF / CR line ends into LF."""
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as err:
            span = SourceSpan(err.start, err.start, 1, 1)
            raise ParseError("input is not valid UTF-8", span, ["UTF-8 text"], "lexical")
    return source.replace("\r\n", "\n").replace("\r", "\n")


class _Positions(object):
    """Maps character offsets to byte offsets and line/column pairs."""

    def __init__(self, text: str):
        self.byte_at = [0]
        for ch in text:
            self.byte_at.append(self.byte_at[-1] + len(ch.encode("utf-8")))
        self.line_starts = [0] + [i + 1 for i, ch in enumerate(text) if ch == "\n"]

    def span(self, start: int, stop: int) -> SourceSpan:
        lo, hi = 0, len(self.line_starts)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.line_starts[mid] <= start:
                lo = mid
            else:
                hi = mid
        return SourceSpan(
            self.byte_at[start], self.byte_at[stop], lo + 1, start - self.line_starts[lo] + 1
        )


def tokenize(text: str) -> List[Token]:
    positions = _Positions(text)
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise ParseError(
                f"unexpected character {text[pos]!r}",
                positions.span(pos, pos + 1),
                [IDENT, INT, "comment", "symbol"],
                "lexical",
            )
        kind = match.lastgroup
        value = match.group()
        span = positions.span(pos, match.end())
        if kind == "ident":
            tokens.append(Token(value if value in KEYWORDS else IDENT, value, span))
        elif kind == "int":
            tokens.append(Token(INT, value, span))
        elif kind == "symbol":
            value = ALIASES.get(value, value)
            tokens.append(Token(value, value, span))
        pos = match.end()
    tokens.append(Token(EOF, "", positions.span(len(text), len(text))))
    return tokens
