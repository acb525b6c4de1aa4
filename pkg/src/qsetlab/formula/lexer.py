from __future__ import annotations

from dataclasses import dataclass

from ..errors import LexError
from .syntax import FUNCTIONS, PREDICATES

# token kinds
IDENT = "ident"
PRED = "pred"
FUNC = "func"
REL = "rel"
CONN = "conn"
QUANT = "quant"
INT = "int"
PUNCT = "punct"
POWER = "power"
EOF = "eof"


@dataclass(frozen=True)
class Token:
    kind: str
    lexeme: str  # source text
    value: str  # canonical ASCII spelling
    span: tuple[int, int]


# Longest match wins; every entry maps a spelling to (kind, canonical value).
_SYMBOLS = {
    "<->": (CONN, "<->"), "->": (CONN, "->"), "&": (CONN, "&"), "|": (CONN, "|"),
    "~": (CONN, "~"), "¬": (CONN, "~"), "∧": (CONN, "&"), "∨": (CONN, "|"),
    "→": (CONN, "->"), "↔": (CONN, "<->"),
    "==": (REL, "=="), "≡": (REL, "=="), "∈": (REL, "in"),
    "=E": (REL, "=E"), "=_E": (REL, "=E"), "=": (REL, "=E"),
    "<=": (REL, "<="), "≤": (REL, "<="),
    "∀": (QUANT, "forall"), "∃": (QUANT, "exists"),
    "∀_Q": (QUANT, "forallQ"), "∃_Q": (QUANT, "existsQ"), "∃_Q!": (QUANT, "existsQ!"),
    "(": (PUNCT, "("), ")": (PUNCT, ")"), ",": (PUNCT, ","),
    "^": (POWER, "^"),
}
_MAX_SYMBOL = max(map(len, _SYMBOLS))

_KEYWORDS = {
    "forall": (QUANT, "forall"), "exists": (QUANT, "exists"),
    "forallQ": (QUANT, "forallQ"), "existsQ": (QUANT, "existsQ"),
    "in": (REL, "in"),
}
_KEYWORDS.update({p: (PRED, p) for p in PREDICATES})
_KEYWORDS.update({f: (FUNC, f) for f in FUNCTIONS})


def tokenize(src: str) -> list[Token]:
    """Split formula text into tokens (the trailing EOF token is not included).

    ASCII aliases and the Unicode symbols are both accepted; ``value`` is
    always the ASCII spelling.
    """
    tokens = []
    i, n = 0, len(src)
    while i < n:
        c = src[i]
        if c.isspace():
            i += 1
            continue
        if c.isalpha() or c == "_":
            j = i + 1
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            word = src[i:j]
            if word == "existsQ" and j < n and src[j] == "!":
                j += 1
                tokens.append(Token(QUANT, src[i:j], "existsQ!", (i, j)))
            else:
                kind, value = _KEYWORDS.get(word, (IDENT, word))
                tokens.append(Token(kind, word, value, (i, j)))
            i = j
            continue
        if c.isdigit():
            j = i + 1
            while j < n and src[j].isdigit():
                j += 1
            tokens.append(Token(INT, src[i:j], src[i:j], (i, j)))
            i = j
            continue
        for size in range(min(_MAX_SYMBOL, n - i), 0, -1):
            hit = _SYMBOLS.get(src[i:i + size])
            if hit is not None:
                tokens.append(Token(hit[0], src[i:i + size], hit[1], (i, i + size)))
                i += size
                break
        else:
            raise LexError(f"unexpected character {c!r}", (i, i + 1))
    return tokens
