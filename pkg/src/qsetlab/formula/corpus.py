"""Named quasi-set axioms, checked constructively.

Existential axioms are not decided by quantifying over every conceivable
qset.  For each instance the universe operations build a witness, and the
axiom's matrix is then evaluated on the witness-extended universe.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..errors import ResourceError, ValidationError
from .. import universe as U
from ..universe import POWER_BOUND, Universe
from .evaluator import evaluate
from .parser import parse
from .syntax import BinOp, Quant, Rel, Var, format_formula, free_vars

CORPUS = ("weak_pair", "separation", "quasi_cardinality", "subqset_cardinals",
          "power_qset", "weak_extensionality")

# The axioms as stated, for display and parser golden tests.  The checkers
# below evaluate their matrices instance by instance.
AXIOM_TEXT = {
    "weak_pair": "forall x forall y existsQ z forall t (t in z <-> t == x | t == y)",
    "separation": "forallQ x existsQ y forall t (t in y <-> t in x & m(t))",
    "quasi_cardinality": "forallQ x existsQ! y (Cd(y) & y =E qc(x) & (Z(x) -> y =E card(x)))",
    "subqset_cardinals": ("forallQ x forall a (qc(x) =E a -> forall b (b <= a -> "
                          "existsQ y ((forall t (t in y -> t in x)) & qc(y) =E b)))"),
    "power_qset": ("forallQ x existsQ p ((forall s (s in p <-> Q(s) & forall t (t in s -> t in x))) "
                   "& qc(p) =E 2^qc(x))"),
    "weak_extensionality": (
        "forallQ x forallQ y ((forallQ z ((exists a (a in x & forall b (b in z <-> b in x & b == a))) "
        "-> existsQ w ((exists a (a in y & forall b (b in w <-> b in y & b == a))) & "
        "(forall c forall d (c in z & d in w -> c == d)) & qc(z) =E qc(w)))) & "
        "(forallQ w ((exists a (a in y & forall b (b in w <-> b in y & b == a))) -> "
        "existsQ z ((exists a (a in x & forall b (b in z <-> b in x & b == a))) & "
        "(forall c forall d (c in w & d in z -> c == d)) & qc(w) =E qc(z)))) -> x == y)"),
}

_WEAK_PAIR = parse("forall t (t in z <-> t == x | t == y)")
_QUASI_CARD = parse("Cd(qc(x)) & (Z(x) -> qc(x) =E card(x))")
_SUBQSET = parse("qc(y) =E b & forall t (t in y -> t in x)")
_POWER = parse("qc(p) =E 2^qc(x) & forall s (s in p -> Q(s) & forall t (t in s -> t in x))")
_INDIST = parse("x == y")

MAX_REPORTED = 50
NESTED_POWER_BOUND = 8


@dataclass
class CorpusVerdict:
    axiom: str
    holds: bool
    instances: int = 0
    witnesses: list = field(default_factory=list)
    counterexample: dict | None = None
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "axiom": self.axiom, "holds": self.holds, "instances": self.instances,
            "witnesses": self.witnesses[:MAX_REPORTED],
            "counterexample": self.counterexample, "detail": self.detail,
        }


def _stock_separations(u: Universe) -> list:
    stock = [(parse("m(t)"), {}), (parse("M(t)"), {})]
    atoms = u.atoms
    if atoms:
        stock.append((parse("t == c"), {"c": atoms[0].id}))
    return stock


def check_weak_pair(u: Universe) -> CorpusVerdict:
    # [x, y] depends only on the ≡-classes of x and y, so one representative
    # per class covers every instance.
    v = CorpusVerdict("weak_pair", True)
    reps = U.class_representatives(u)
    for i, x in enumerate(reps):
        for y in reps[i:]:
            u2, z = U.weak_pair(u, x, y)
            v.instances += 1
            env = {"x": x, "y": y, "z": z}
            if not evaluate(u2, _WEAK_PAIR, env):
                return _fail(v, env)
            v.witnesses.append({"x": x, "y": y, "z": z, "qc": U.qc(u2, z)})
    return v


def check_separation(u: Universe, alphas=None) -> CorpusVerdict:
    """``alphas``: list of (formula, parameter valuation); defaults to the stock instances."""
    v = CorpusVerdict("separation", True)
    if alphas is None:
        alphas = _stock_separations(u)
    prepared = []
    for alpha, params in alphas:
        if isinstance(alpha, str):
            alpha = parse(alpha)
        free = free_vars(alpha) - set(params)
        if len(free) != 1:
            raise ValidationError(f"separation: formula must have one free variable, has {sorted(free)}")
        (var,) = free
        sname, xname = "sep_result", "sep_source"
        while sname in params or sname == var:
            sname += "_"
        while xname in params or xname == var:
            xname += "_"
        t = Var(var)
        matrix = Quant("forall", (var,), BinOp(
            "<->", Rel("in", t, Var(sname)), BinOp("&", Rel("in", t, Var(xname)), alpha)))
        prepared.append((alpha, params, var, sname, xname, matrix))
    for x in u.qset_handles:
        for alpha, params, var, sname, xname, matrix in prepared:
            u2, s = U.separation(u, x, alpha, var=var, valuation=params)
            v.instances += 1
            env = {**params, sname: s, xname: x}
            if not evaluate(u2, matrix, env):
                return _fail(v, {"x": x, "alpha": format_formula(alpha), "witness": s})
            v.witnesses.append({"x": x, "var": var, "witness": s, "qc": U.qc(u2, s)})
    return v


def check_quasi_cardinality(u: Universe) -> CorpusVerdict:
    v = CorpusVerdict("quasi_cardinality", True)
    for x in u.qset_handles:
        v.instances += 1
        n = U.qc(u, x)
        if n != len(u.members(x)) or not evaluate(u, _QUASI_CARD, {"x": x}):
            return _fail(v, {"x": x, "qc": n})
        v.witnesses.append({"x": x, "qc": n, "set": u.is_zfu(x)})
    return v


def check_subqset_cardinals(u: Universe) -> CorpusVerdict:
    v = CorpusVerdict("subqset_cardinals", True)
    for x in u.qset_handles:
        for beta in range(U.qc(u, x) + 1):
            u2, y = U.sub_qset_of_card(u, x, beta)
            v.instances += 1
            env = {"x": x, "y": y, "b": beta}
            if not evaluate(u2, _SUBQSET, env):
                return _fail(v, env)
            v.witnesses.append(env)
    return v


def check_power_qset(u: Universe, bound: int = POWER_BOUND,
                     nested_bound: int = NESTED_POWER_BOUND) -> CorpusVerdict:
    # Qsets of atoms must all be within `bound`.  Higher-rank qsets above
    # `nested_bound` (e.g. materialized power qsets, whose own power qsets
    # explode doubly exponentially) are skipped and counted in `detail`.
    v = CorpusVerdict("power_qset", True)
    skipped = 0
    for x in u.qset_handles:
        n = U.qc(u, x)
        if u.rank(x) <= 1:
            if n > bound:
                raise ResourceError(f"power_qset: qc({x})={n} exceeds bound {bound}")
        elif n > min(bound, nested_bound):
            skipped += 1
            continue
        u2, p = U.power_qset(u, x, bound)
        v.instances += 1
        env = {"x": x, "p": p}
        subs = u2.members(p)
        distinct = len({u2.member_set(s) for s in subs}) == len(subs)
        if not (distinct and evaluate(u2, _POWER, env)):
            return _fail(v, env)
        v.witnesses.append({"x": x, "p": p, "qc": len(subs)})
    if skipped:
        v.detail = f"{skipped} higher-rank qset(s) above {min(bound, nested_bound)} members skipped"
    return v


def _quotients_match(u: Universe, cx, cy) -> bool:
    def matched(z, ts):
        return any(len(z) == len(t) and all(U.indist(u, a, b) for a in z for b in t) for t in ts)
    return all(matched(z, cy) for z in cx) and all(matched(t, cx) for t in cy)


def check_weak_extensionality(u: Universe) -> CorpusVerdict:
    v = CorpusVerdict("weak_extensionality", True)
    targets = [x for x in u.qset_handles if u.rank(x) <= 1]
    quot = {x: U.classes(u, x) for x in targets}
    shape = {x: (U.qc(u, x), len(quot[x])) for x in targets}
    for x, y in itertools.combinations(targets, 2):
        v.instances += 1
        # a QSim matching is a bijection of classes with equal sizes, so
        # differing (qc, class count) already falsifies the antecedent
        if shape[x] != shape[y] or not _quotients_match(u, quot[x], quot[y]):
            continue
        if not evaluate(u, _INDIST, {"x": x, "y": y}):
            return _fail(v, {"x": x, "y": y})
        v.witnesses.append({"x": x, "y": y})
    v.detail = f"{len(targets)} rank-1 qsets"
    return v


def _fail(v: CorpusVerdict, instance: dict) -> CorpusVerdict:
    v.holds = False
    v.counterexample = instance
    return v


_CHECKERS = {
    "weak_pair": check_weak_pair,
    "separation": check_separation,
    "quasi_cardinality": check_quasi_cardinality,
    "subqset_cardinals": check_subqset_cardinals,
    "power_qset": check_power_qset,
    "weak_extensionality": check_weak_extensionality,
}


def check_axiom(u: Universe, name: str, **options) -> CorpusVerdict:
    """Check one named axiom; ``options`` go to the checker (``alphas``, ``bound``)."""
    try:
        checker = _CHECKERS[name]
    except KeyError:
        raise ValidationError(f"unknown axiom {name!r}; expected one of {', '.join(CORPUS)}") from None
    return checker(u, **options)


def check_corpus(u: Universe, names=CORPUS) -> list[CorpusVerdict]:
    if isinstance(names, str):
        names = CORPUS if names == "all" else (names,)
    return [check_axiom(u, n) for n in names]
