"""Recursive-descent parser.

Grammar (loosest to tightest)::

    formula := iff
    iff     := imp ('<->' imp)*              left-associative
    imp     := or ('->' imp)?                right-associative
    or      := and ('|' and)*
    and     := unary ('&' unary)*
    unary   := '~' unary | QUANT ident (',' ident)* formula | primary
    primary := '(' formula ')' | PRED '(' term ')' | term REL term
    term    := base ('^' term)?
    base    := INT | ident | FUNC '(' term ')'

A quantifier body is a whole ``formula``, so quantifiers extend as far
right as possible.
"""
from __future__ import annotations

from ..errors import ParseError, ScopeError, SortError
from . import lexer as lx
from .lexer import Token, tokenize
from .syntax import BinOp, Func, Not, Num, Pow, Pred, Quant, Rel, Var, free_vars


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = list(tokens)
        end = self.tokens[-1].span[1] if self.tokens else 0
        if not self.tokens or self.tokens[-1].kind != lx.EOF:
            self.tokens.append(Token(lx.EOF, "", "<end>", (end, end)))
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def at(self, kind, value=None) -> bool:
        t = self.tok
        return t.kind == kind and (value is None or t.value == value)

    def expect(self, kind, value=None, what=None) -> Token:
        if not self.at(kind, value):
            self.fail(what or value or kind)
        return self.advance()

    def fail(self, *expected):
        t = self.tok
        found = "end of input" if t.kind == lx.EOF else repr(t.lexeme)
        raise ParseError(f"unexpected {found}", t.span, expected)

    def span_from(self, start: int):
        return (start, self.tokens[self.pos - 1].span[1])

    # -- formulas -------------------------------------------------------------

    def formula(self):
        return self.iff()

    def iff(self):
        start = self.tok.span[0]
        left = self.imp()
        while self.at(lx.CONN, "<->"):
            self.advance()
            right = self.imp()
            left = BinOp("<->", left, right, self.span_from(start))
        return left

    def imp(self):
        start = self.tok.span[0]
        left = self.disj()
        if self.at(lx.CONN, "->"):
            self.advance()
            right = self.imp()
            return BinOp("->", left, right, self.span_from(start))
        return left

    def disj(self):
        start = self.tok.span[0]
        left = self.conj()
        while self.at(lx.CONN, "|"):
            self.advance()
            left = BinOp("|", left, self.conj(), self.span_from(start))
        return left

    def conj(self):
        start = self.tok.span[0]
        left = self.unary()
        while self.at(lx.CONN, "&"):
            self.advance()
            left = BinOp("&", left, self.unary(), self.span_from(start))
        return left

    def unary(self):
        start = self.tok.span[0]
        if self.at(lx.CONN, "~"):
            self.advance()
            return Not(self.unary(), self.span_from(start))
        if self.at(lx.QUANT):
            kind = self.advance().value
            names = [self.expect(lx.IDENT, what="variable").value]
            while self.at(lx.PUNCT, ","):
                self.advance()
                names.append(self.expect(lx.IDENT, what="variable").value)
            if kind == "existsQ!" and len(names) > 1:
                raise ParseError("existsQ! binds a single variable", self.span_from(start))
            body = self.formula()
            return Quant(kind, tuple(names), body, self.span_from(start))
        return self.primary()

    def primary(self):
        start = self.tok.span[0]
        if self.at(lx.PUNCT, "("):
            self.advance()
            f = self.formula()
            self.expect(lx.PUNCT, ")")
            return f
        if self.at(lx.PRED):
            name = self.advance().value
            self.expect(lx.PUNCT, "(")
            arg = self.term()
            self.expect(lx.PUNCT, ")")
            return Pred(name, arg, self.span_from(start))
        if self.at(lx.INT) or self.at(lx.IDENT) or self.at(lx.FUNC):
            left = self.term()
            if not self.at(lx.REL):
                self.fail("==", "in", "=E", "<=", "^")
            op = self.advance().value
            right = self.term()
            return Rel(op, left, right, self.span_from(start))
        self.fail("(", "~", "quantifier", "predicate", "term")

    # -- terms ----------------------------------------------------------------

    def term(self):
        start = self.tok.span[0]
        base = self.base()
        if self.at(lx.POWER):
            self.advance()
            return Pow(base, self.term(), self.span_from(start))
        return base

    def base(self):
        start = self.tok.span[0]
        if self.at(lx.INT):
            return Num(int(self.advance().value), self.span_from(start))
        if self.at(lx.IDENT):
            return Var(self.advance().value, self.span_from(start))
        if self.at(lx.FUNC):
            name = self.advance().value
            self.expect(lx.PUNCT, "(")
            arg = self.term()
            self.expect(lx.PUNCT, ")")
            return Func(name, arg, self.span_from(start))
        self.fail("integer", "variable", "qc", "card")


def parse(src, *, free: set[str] | None = None, sorts: dict[str, str] | None = None):
    """Parse formula text (or a token list) into an AST.

    ``free`` declares the permitted free variables; any other unbound
    variable is a ScopeError.  ``sorts`` maps free variables to 'm', 'M' or
    'Q'; an =E operand that is an m-sorted variable is rejected statically.
    """
    tokens = tokenize(src) if isinstance(src, str) else src
    p = _Parser(tokens)
    f = p.formula()
    if not p.at(lx.EOF):
        p.fail("end of input", "&", "|", "->", "<->")
    if free is not None:
        extra = free_vars(f) - set(free)
        if extra:
            raise ScopeError(f"unbound variable(s) {', '.join(sorted(extra))}")
    if sorts:
        check_sorts(f, sorts)
    return f


def check_sorts(f, sorts: dict[str, str], bound: frozenset = frozenset()):
    """Reject =E applied to a variable declared as an m-atom."""
    if isinstance(f, Rel):
        if f.op == "=E":
            for side in (f.left, f.right):
                if isinstance(side, Var) and side.name not in bound and sorts.get(side.name) == "m":
                    raise SortError(f"=E applied to m-atom {side.name!r}", side.span, f)
        return
    if isinstance(f, Pred):
        return
    if isinstance(f, Not):
        check_sorts(f.body, sorts, bound)
    elif isinstance(f, BinOp):
        check_sorts(f.left, sorts, bound)
        check_sorts(f.right, sorts, bound)
    elif isinstance(f, Quant):
        check_sorts(f.body, sorts, bound | set(f.vars))
