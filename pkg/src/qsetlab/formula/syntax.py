"""Abstract syntax for the quasi-set language and its canonical printer.

Spans are carried for error reporting but excluded from equality, so a
reparsed formula compares equal to the original regardless of layout.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

PREDICATES = ("m", "M", "Z", "Q", "Cd")
FUNCTIONS = ("qc", "card")
RELATIONS = ("==", "in", "=E", "<=")
CONNECTIVES = ("&", "|", "->", "<->")
QUANTIFIERS = ("forall", "exists", "forallQ", "existsQ", "existsQ!")

# binding strength of binary connectives; higher binds tighter
PRECEDENCE = {"<->": 1, "->": 2, "|": 3, "&": 4}
RIGHT_ASSOC = {"->"}
NOT_PREC = 5

Span = tuple  # (start, end) character offsets


def _span():
    return field(default=None, compare=False, repr=False)


# -- terms ------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str
    span: Span = _span()


@dataclass(frozen=True)
class Num:
    value: int
    span: Span = _span()


@dataclass(frozen=True)
class Func:
    name: str  # "qc" or "card"
    arg: "Term"
    span: Span = _span()


@dataclass(frozen=True)
class Pow:
    base: "Term"
    exp: "Term"
    span: Span = _span()


Term = Union[Var, Num, Func, Pow]


# -- formulas ---------------------------------------------------------------

@dataclass(frozen=True)
class Pred:
    name: str
    arg: Term
    span: Span = _span()


@dataclass(frozen=True)
class Rel:
    op: str
    left: Term
    right: Term
    span: Span = _span()


@dataclass(frozen=True)
class Not:
    body: "Formula"
    span: Span = _span()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Formula"
    right: "Formula"
    span: Span = _span()


@dataclass(frozen=True)
class Quant:
    kind: str
    vars: tuple[str, ...]
    body: "Formula"
    span: Span = _span()


Formula = Union[Pred, Rel, Not, BinOp, Quant]


def term_vars(t) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Num):
        return set()
    if isinstance(t, Func):
        return term_vars(t.arg)
    return term_vars(t.base) | term_vars(t.exp)


def free_vars(f) -> set[str]:
    if isinstance(f, Pred):
        return term_vars(f.arg)
    if isinstance(f, Rel):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, BinOp):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, Quant):
        return free_vars(f.body) - set(f.vars)
    raise TypeError(f"not a formula: {f!r}")


def depth(f) -> int:
    """Connective/quantifier nesting depth; atomic formulas have depth 0."""
    if isinstance(f, (Pred, Rel)):
        return 0
    if isinstance(f, Not):
        return 1 + depth(f.body)
    if isinstance(f, BinOp):
        return 1 + max(depth(f.left), depth(f.right))
    return len(f.vars) + depth(f.body)


def binder_count(f) -> int:
    if isinstance(f, (Pred, Rel)):
        return 0
    if isinstance(f, Not):
        return binder_count(f.body)
    if isinstance(f, BinOp):
        return binder_count(f.left) + binder_count(f.right)
    return len(f.vars) + binder_count(f.body)


# -- printing ---------------------------------------------------------------

def format_term(t) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Num):
        return str(t.value)
    if isinstance(t, Func):
        return f"{t.name}({format_term(t.arg)})"
    if isinstance(t, Pow):
        if isinstance(t.base, Pow):
            raise ValueError("power base must not itself be a power")
        return f"{format_term(t.base)}^{format_term(t.exp)}"
    raise TypeError(f"not a term: {t!r}")


def _prec(f) -> int:
    if isinstance(f, BinOp):
        return PRECEDENCE[f.op]
    if isinstance(f, Quant):
        return 0
    return NOT_PREC + 1 if not isinstance(f, Not) else NOT_PREC


def _fmt(f, rightmost: bool) -> str:
    # A quantifier swallows everything to its right, so it needs parentheses
    # whenever text follows it.
    if isinstance(f, Pred):
        return f"{f.name}({format_term(f.arg)})"
    if isinstance(f, Rel):
        return f"{format_term(f.left)} {f.op} {format_term(f.right)}"
    if isinstance(f, Not):
        body = f.body
        if isinstance(body, BinOp):
            return f"~({_fmt(body, True)})"
        return "~" + _fmt(body, rightmost)
    if isinstance(f, Quant):
        body = f.body
        if isinstance(body, BinOp):
            text = f"{f.kind} {', '.join(f.vars)} ({_fmt(body, True)})"
        else:
            text = f"{f.kind} {', '.join(f.vars)} {_fmt(body, True)}"
        return text if rightmost else f"({text})"
    if isinstance(f, BinOp):
        p = PRECEDENCE[f.op]
        lp, rp = _prec(f.left), _prec(f.right)
        left_paren = lp < p or (lp == p and f.op in RIGHT_ASSOC) or isinstance(f.left, Quant)
        right_paren = rp < p and not isinstance(f.right, Quant) or (rp == p and f.op not in RIGHT_ASSOC)
        left = f"({_fmt(f.left, True)})" if left_paren else _fmt(f.left, False)
        right = f"({_fmt(f.right, True)})" if right_paren else _fmt(f.right, rightmost)
        return f"{left} {f.op} {right}"
    raise TypeError(f"not a formula: {f!r}")


def format_formula(f) -> str:
    """Canonical ASCII rendering; parses back to an equal AST."""
    return _fmt(f, True)
