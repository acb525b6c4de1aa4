"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line.

The lines are printed in the terminal summary (see conftest.py).
"""
import io
import itertools
import json
import random
import time
from fractions import Fraction
from pathlib import Path

from qsetlab import do_model as D
from qsetlab import rational_model as R
from qsetlab import universe as U
from qsetlab.cli import run
from qsetlab.errors import ResourceError, SortError
from qsetlab.formula import AXIOM_TEXT, evaluate, format_formula, free_vars, parse
from qsetlab.universe import Atom, Universe

from .conftest import ACCEPTANCE
from .generators import formulas, random_universe, small_universes
from .oracles import all_subcollections, is_equivalence, make_indist, numeric_equiv, weak_pair_scan
from .reference_eval import reference_evaluate

FIXTURES = Path(__file__).parent / "fixtures"


def record(n: int, ok: bool, detail: str):
    ACCEPTANCE[n] = (ok, detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def satisfiable_do(rng: random.Random, n_range, species_max=4):
    n = rng.randint(*n_range)
    species = rng.randint(1, species_max)
    n_macro = rng.randint(0, min(species - 1, n))
    return D.gen_do(n, species, Fraction(n - n_macro, n), rng.randrange(10**6))


def sequence_pool(rng: random.Random, size: int):
    limits = [(0, 1, 2), (0, 2, 2), (1, 1, 2), (0, 1, 3), ("1/2", "1/2", 2), (0, -1, 5), (3, "2/3", 7)]
    pool = []
    for _ in range(size):
        q, r, d = rng.choice(limits)
        pool.append(R.MSequence(R.LimitDescriptor(Fraction(q), Fraction(r), d), rng.choice(sorted(R.TAILS))))
    return pool


# -- 1 ------------------------------------------------------------------------

def test_criterion_1_equivalence_relations():
    start = time.perf_counter()
    failures, checked = [], 0
    rng = random.Random(1)

    def check(label, items, rel):
        nonlocal checked
        ok, why = is_equivalence(items, rel)
        checked += 1
        if not ok:
            failures.append((label, why))

    for u in small_universes():
        check("indist/small", u.handles, lambda a, b, u=u: U.indist(u, a, b))
    for _ in range(200):
        u = random_universe(rng, n_atoms=rng.randint(5, 8), n_qsets=rng.randint(3, 6))
        check("indist/large", u.handles, lambda a, b, u=u: U.indist(u, a, b))

    for n in range(1, 9):
        for species in range(1, 5):
            for n_macro in range(0, min(species - 1, n) + 1):
                for seed in range(3):
                    s = D.gen_do(n, species, Fraction(n - n_macro, n), seed)
                    check("phys/small", s.P, D.phys_indist)
    for _ in range(200):
        check("phys/large", satisfiable_do(rng, (9, 16)).P, D.phys_indist)

    for k in range(1, 9):
        check("seq/small", sequence_pool(rng, k), R.seq_equiv)
    for _ in range(200):
        check("seq/large", sequence_pool(rng, 12), R.seq_equiv)

    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 10
    record(1, ok, f"{checked} relation instances, {len(failures)} failures, {elapsed:.2f} s (< 10 s)")


# -- 2 ------------------------------------------------------------------------

def test_criterion_2_weak_pair_oracle():
    rng = random.Random(2)
    mismatches = 0
    for _ in range(500):
        u = random_universe(rng, n_atoms=rng.randint(1, 6))
        x, y = rng.choice(u.handles), rng.choice(u.handles)
        u2, h = U.weak_pair(u, x, y)
        if frozenset(u2.members(h)) != weak_pair_scan(u, x, y):
            mismatches += 1
    record(2, mismatches == 0, f"500 triples, {mismatches} mismatches")


# -- 3 ------------------------------------------------------------------------

def test_criterion_3_power_qset_count():
    start = time.perf_counter()
    rng = random.Random(3)
    bad = []
    for n in range(13):
        atoms = [Atom(f"a{i}", *rng.choice([("m", "e"), ("m", "mu"), ("M", "c")])) for i in range(n)]
        u = Universe(atoms, [("x", [a.id for a in atoms], None)])
        u2, p = U.power_qset(u, "x")
        subs = [frozenset(u2.members(s)) for s in u2.members(p)]
        enumerated = all_subcollections(u.members("x"))
        if U.qc(u2, p) != 2 ** n or len(subs) != len(enumerated) or set(subs) != set(enumerated):
            bad.append(n)
    elapsed = time.perf_counter() - start
    record(3, not bad and elapsed < 30, f"qc 0..12, mismatched sizes {bad}, {elapsed:.2f} s (< 30 s)")


# -- 4 ------------------------------------------------------------------------

def test_criterion_4_sub_qset_of_card():
    rng = random.Random(4)
    failures = cases = 0
    witness_check = parse("qc(w) =E b & forall t (t in w -> t in x)")
    for size in range(13):
        for _ in range(3):
            atoms = [Atom(f"a{i}", *rng.choice([("m", "e"), ("M", "c")])) for i in range(size)]
            inner = [("inner", [a.id for a in atoms[:2]], None)] if size else []
            pool = [a.id for a in atoms] + [h for h, _, _ in inner]
            members = rng.sample(pool, size)
            u = Universe(atoms, inner + [("x", members, None)])
            for beta in range(size + 1):
                cases += 1
                u2, w = U.sub_qset_of_card(u, "x", beta)
                ok = (U.qc(u2, w) == beta and set(u2.members(w)) <= set(members)
                      and evaluate(u2, witness_check, {"w": w, "b": beta, "x": "x"}))
                failures += not ok
    record(4, failures == 0, f"{cases} (qset, beta) cases, {failures} failures")


# -- 5 ------------------------------------------------------------------------

def test_criterion_5_interpretation_soundness(tmp_path):
    rng = random.Random(5)
    failures = []
    for k in range(100):
        s = satisfiable_do(rng, (1, 8))
        sys_path, uni_path = tmp_path / f"s{k}.json", tmp_path / f"u{k}.json"
        D.dump_system(s, sys_path)
        code_i = cli("interpret", "--in", sys_path, "--out", uni_path)[0]
        code_a = cli("axioms", "--universe", uni_path, "--corpus", "all")[0] if code_i == 0 else None
        if code_i != 0 or code_a != 0:
            failures.append((k, code_i, code_a))
    record(5, not failures, f"100 systems, {len(failures)} failures {failures[:3]}")


# -- 6 ------------------------------------------------------------------------

def _quantity(text):
    value, _, unit = str(text).partition(" ")
    return Fraction(value), unit


def _raw_particles(doc):
    """(state, hidden value, scale tags) per particle, read straight from the JSON."""
    lams = [Fraction(v) for v in doc["lambda"]]
    out = []
    for entry in doc["P"]:
        x = doc["X"][entry["x"]] if isinstance(entry["x"], int) else entry["x"]
        state = frozenset((k, _quantity(v)) for k, v in x.items())
        lam = lams[entry["lam"] - 1] if isinstance(entry["lam"], int) else Fraction(entry["lam"])
        scale = entry.get("scale", "micro")
        tags = frozenset([scale] if isinstance(scale, str) else scale)
        out.append((state, lam, tags))
    return lams, out


def witness_is_violation(doc, axiom, witness) -> bool:
    lams, P = _raw_particles(doc)
    X = {frozenset((k, _quantity(v)) for k, v in x.items()) for x in doc["X"]}
    if axiom == "D1":
        i, j = witness
        return i != j and lams[i - 1] == lams[j - 1]
    if axiom == "D2":
        (i,) = witness
        state, lam, _ = P[i - 1]
        return state not in X or lam not in set(lams)
    if axiom == "D6":
        (i,) = witness
        return len(P[i - 1][2] & {"micro", "macro"}) != 1
    (i, j) = witness
    (xa, la, ta), (xb, lb, tb) = P[i - 1], P[j - 1]
    distinct = P[i - 1] != P[j - 1]
    if axiom == "D3":
        return la == lb and xa != xb
    twins = xa == xb and distinct
    if axiom == "D4":
        return twins and "macro" in ta and "macro" in tb
    return twins and not ({"micro"} == ta == tb)


def test_criterion_6_counterexamples():
    files = sorted((FIXTURES / "do_invalid").glob("*.json"))
    confirmed = []
    for f in files:
        axiom = f.name[:2].upper()
        code, out, _ = cli("check-do", "--in", f, "--axiom", axiom, "--json")
        verdict = json.loads(out)["verdicts"][0]
        doc = json.loads(f.read_text())
        if code == 1 and not verdict["holds"] and witness_is_violation(doc, axiom, verdict["witness"]):
            confirmed.append(f.name)
    per_axiom = {a: sum(n.startswith(a.lower()) for n in confirmed) for a in D.AXIOMS}
    ok = len(files) == 12 and len(confirmed) == 12 and set(per_axiom.values()) == {2}
    record(6, ok, f"{len(confirmed)}/{len(files)} fixtures exit 1 with a re-verified witness")


# -- 7 ------------------------------------------------------------------------

def test_criterion_7_pair_collapse():
    universes = [U.load_universe(p) for p in sorted((FIXTURES / "universes").glob("*.json"))]
    universes += list(small_universes())
    pairs = failures = 0
    for u in universes:
        eq = make_indist(u)
        atoms = [a.id for a in u.atoms]
        for x, y in itertools.product(atoms, repeat=2):
            if not eq(x, y):
                continue
            pairs += 1
            u1, xy = U.ordered_qpair(u, x, y)
            u1, yx = U.ordered_qpair(u1, y, x)
            u1, sx = U.weak_singleton(u1, x)
            u1, ssx = U.weak_singleton(u1, sx)
            if not (U.ext_eq(u1, xy, yx) is True and U.ext_eq(u1, xy, ssx) is True):
                failures += 1
    record(7, failures == 0 and pairs > 0, f"{pairs} indistinguishable atom pairs, {failures} failures")


# -- 8 ------------------------------------------------------------------------

def test_criterion_8_rational_model(tmp_path):
    spec = R.demo_spec()
    uni = tmp_path / "rational.json"
    code_b = cli("build-rational", "--out", uni)[0]
    code_a = cli("axioms", "--universe", uni, "--corpus", "all")[0]
    seqs = list(spec.sequences)
    mismatches = sum(R.seq_equiv(a, b) != numeric_equiv(a, b, m=40, tol=Fraction(1, 10**6))
                     for a, b in itertools.product(seqs, repeat=2))
    blocks = sorted(sum(R.seq_equiv(a, b) for b in seqs) for a in seqs)
    ok = (code_b == 0 and code_a == 0 and mismatches == 0
          and len(spec.rationals) == 2 and blocks == [1, 1, 2, 2])
    record(8, ok, f"build exit {code_b}, corpus exit {code_a}, {mismatches} seq_equiv mismatches")


# -- 9 ------------------------------------------------------------------------

def test_criterion_9_evaluator_cross_check():
    start = time.perf_counter()
    rng = random.Random(9)
    mismatches = total = 0

    def outcome(fn, u, f, val):
        try:
            return fn(u, f, val)
        except (SortError, ResourceError) as exc:
            return type(exc).__name__

    for k in range(20):
        u = random_universe(rng, n_atoms=rng.randint(1, 3), n_qsets=rng.randint(1, 2))
        for f in formulas(900 + k, 50, 4, scope=("p",)):
            val = {"p": rng.choice(u.handles)} if "p" in free_vars(f) else {}
            total += 1
            mismatches += outcome(evaluate, u, f, val) != outcome(reference_evaluate, u, f, val)
    elapsed = time.perf_counter() - start
    ok = total == 1000 and mismatches == 0 and elapsed < 60
    record(9, ok, f"{total} formulas over 20 universes, {mismatches} mismatches, {elapsed:.2f} s (< 60 s)")


# -- 10 -----------------------------------------------------------------------

def test_criterion_10_parser_round_trip():
    golden = (FIXTURES / "golden" / "axioms.golden").read_text(encoding="utf-8").splitlines()
    good = total = 0
    for line in golden:
        name, expected = line.split("\t")
        f = parse(AXIOM_TEXT[name])
        total += 1
        good += format_formula(f) == expected and parse(expected) == f
    for f in formulas(10, 200, 5, scope=("p", "q")):
        total += 1
        text = format_formula(f)
        good += parse(text) == f and format_formula(parse(text)) == text
    ok = len(golden) == len(AXIOM_TEXT) and good == total
    record(10, ok, f"{good}/{total} reparse-identical ({len(golden)} golden axioms + 200 generated)")
