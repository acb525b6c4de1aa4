"""Exhaustive Tarskian evaluation over a finite universe.

Values are entity handles (``str``) or cardinals (``int``).  Plain
quantifiers range over every entity, the Q-relativized ones over qsets
only.  Connectives short-circuit left to right, so a guard such as
``Q(x) -> qc(x) <= 2`` never evaluates ``qc`` on an atom.

Mixed-sort comparisons (entity vs cardinal) under ``==``, ``in`` and ``=E``
are false; ``<=`` and the functions raise SortError outside their sort, as
does ``=E`` with an m-atom operand.

A formula is compiled once per universe into nested closures over a
mutable environment dict; quantifiers bind and restore their variables.
"""
from __future__ import annotations

from ..errors import ResourceError, ScopeError, SortError, ValidationError
from ..universe import MICRO, Universe
from .parser import parse
from .syntax import BinOp, Func, Not, Num, Pow, Pred, Quant, Rel, Var, free_vars, term_vars

MAX_EXPONENT = 4096
_UNBOUND = object()


class _Compiler:
    def __init__(self, u: Universe):
        self.u = u
        self.handles = u.handles
        self.qsets = u.qset_handles
        self.sig = u._sig
        self.mset = u._mset
        self.kind = {e.id: getattr(e, "kind", "Q") for e in u.entities}
        self.zfu = {q.id: q.zfu for q in u.qsets}
        self.qset_set = frozenset(self.qsets)

    # -- terms ----------------------------------------------------------------

    def term(self, t):
        if isinstance(t, Var):
            name = t.name
            return lambda env: env[name]
        if isinstance(t, Num):
            value = t.value
            return lambda env: value
        if isinstance(t, Func):
            arg, mset, zfu = self.term(t.arg), self.mset, self.zfu
            is_qc = t.name == "qc"

            def func(env):
                v = arg(env)
                if isinstance(v, str) and v in mset:
                    if is_qc or zfu[v]:
                        return len(mset[v])
                    raise SortError(f"card applies to sets only, {v!r} is not a set", t.span, t)
                raise SortError(f"{t.name} applied to non-qset {v!r}", t.span, t)
            return func
        if isinstance(t, Pow):
            base, exp = self.term(t.base), self.term(t.exp)

            def power(env):
                b, e = base(env), exp(env)
                if not (isinstance(b, int) and isinstance(e, int)):
                    raise SortError("^ applies to cardinals only", t.span, t)
                if e > MAX_EXPONENT:
                    raise ResourceError(f"exponent {e} exceeds {MAX_EXPONENT}")
                return b ** e
            return power
        raise TypeError(f"not a term: {t!r}")

    # -- formulas -------------------------------------------------------------

    def formula(self, f):
        if isinstance(f, Rel):
            return self.rel(f)
        if isinstance(f, Pred):
            return self.pred(f)
        if isinstance(f, Not):
            body = self.formula(f.body)
            return lambda env: not body(env)
        if isinstance(f, BinOp):
            a, b = self.formula(f.left), self.formula(f.right)
            if f.op == "&":
                return lambda env: a(env) and b(env)
            if f.op == "|":
                return lambda env: a(env) or b(env)
            if f.op == "->":
                return lambda env: (not a(env)) or b(env)
            return lambda env: a(env) == b(env)
        if isinstance(f, Quant):
            return self.quant(f)
        raise TypeError(f"not a formula: {f!r}")

    def rel(self, f):
        left, right = self.term(f.left), self.term(f.right)
        sig, mset, kind = self.sig, self.mset, self.kind
        op = f.op
        if op in ("==", "in") and isinstance(f.left, Var) and isinstance(f.right, Var):
            # the common case inside quantifier bodies: skip the term closures
            ln, rn = f.left.name, f.right.name
            if op == "==":
                def ident_vars(env):
                    a, b = env[ln], env[rn]
                    if type(a) is str and type(b) is str:
                        return sig[a] == sig[b]
                    return type(a) is int and type(b) is int and a == b
                return ident_vars

            def member_vars(env):
                a, b = env[ln], env[rn]
                return type(a) is str and type(b) is str and a in mset.get(b, ())
            return member_vars
        if op == "==":
            def ident(env):
                a, b = left(env), right(env)
                if isinstance(a, str) and isinstance(b, str):
                    return sig[a] == sig[b]
                return isinstance(a, int) and isinstance(b, int) and a == b
            return ident
        if op == "in":
            def member(env):
                a, b = left(env), right(env)
                return isinstance(a, str) and isinstance(b, str) and a in mset.get(b, ())
            return member
        if op == "=E":
            def ext(env):
                a, b = left(env), right(env)
                for v in (a, b):
                    if isinstance(v, str) and kind[v] == MICRO:
                        raise SortError(f"=E is not applicable to m-atom {v!r}", f.span, f)
                if isinstance(a, str) and isinstance(b, str):
                    ka, kb = kind[a], kind[b]
                    if ka == "Q" and kb == "Q":
                        return mset[a] == mset[b]
                    return ka == kb == "M" and sig[a] == sig[b]
                return isinstance(a, int) and isinstance(b, int) and a == b
            return ext

        def leq(env):
            a, b = left(env), right(env)
            if isinstance(a, int) and isinstance(b, int):
                return a <= b
            raise SortError("<= compares cardinals only", f.span, f)
        return leq

    def pred(self, f):
        arg, kind, zfu, name = self.term(f.arg), self.kind, self.zfu, f.name

        def holds(env):
            v = arg(env)
            if isinstance(v, int):
                return name == "Cd"
            if name == "Cd":
                return False
            k = kind[v]
            if name == "Z":
                return k == "Q" and zfu[v]
            return k == name
        return holds

    def _guard(self, f):
        # forall v ((v in T & ...) -> ...) and exists v (v in T & ...) only
        # need v to range over members of T: other values fail the leftmost
        # conjunct, which short-circuits before anything else is evaluated.
        if len(f.vars) != 1 or not isinstance(f.body, BinOp):
            return None
        body, var = f.body, f.vars[0]
        if f.kind in ("forall", "forallQ"):
            if body.op != "->":
                return None
            g = body.left
        elif f.kind in ("exists", "existsQ"):
            g = body
        else:
            return None
        while isinstance(g, BinOp) and g.op == "&":
            g = g.left
        if (isinstance(g, Rel) and g.op == "in" and isinstance(g.left, Var)
                and g.left.name == var and var not in term_vars(g.right)):
            return g.right
        return None

    def quant(self, f):
        kind = f.kind
        domain = self.qsets if kind.endswith("Q") or kind == "existsQ!" else self.handles
        body = self.formula(f.body)
        mset = self.mset

        if kind == "existsQ!":
            var = f.vars[0]

            def unique(env):
                saved = env.get(var, _UNBOUND)
                found = []
                try:
                    for d in domain:
                        env[var] = d
                        if body(env):
                            found.append(d)
                finally:
                    _restore(env, var, saved)
                return bool(found) and all(mset[d] == mset[found[0]] for d in found)
            return unique

        universal = kind.startswith("forall")
        guard_term = self._guard(f)
        guard = self.term(guard_term) if guard_term is not None else None
        members_of, qset_set = self.u.members, self.qset_set
        qsets_only = domain is self.qsets

        def loop(var, inner):
            def run(env):
                dom = domain
                if guard is not None and dom:
                    container = guard(env)
                    dom = members_of(container) if isinstance(container, str) and container in mset else ()
                    if qsets_only:
                        dom = tuple(m for m in dom if m in qset_set)
                saved = env.get(var, _UNBOUND)
                try:
                    for d in dom:
                        env[var] = d
                        if inner(env) != universal:
                            return not universal
                finally:
                    _restore(env, var, saved)
                return universal
            return run

        fn = body
        for var in reversed(f.vars):
            fn = loop(var, fn)
        return fn


def _restore(env, var, saved):
    if saved is _UNBOUND:
        env.pop(var, None)
    else:
        env[var] = saved


def evaluate(u: Universe, f, valuation: dict | None = None) -> bool:
    """Truth value of ``f`` in ``u`` under ``valuation`` (free variable -> handle)."""
    if isinstance(f, str):
        f = parse(f)
    valuation = dict(valuation or {})
    missing = free_vars(f) - set(valuation)
    if missing:
        raise ScopeError(f"no value for free variable(s) {', '.join(sorted(missing))}")
    for name, h in valuation.items():
        if isinstance(h, bool) or not isinstance(h, (str, int)):
            raise ValidationError(f"valuation for {name!r} must be a handle or cardinal")
        if isinstance(h, str):
            u.require(h)
    return _Compiler(u).formula(f)(valuation)
