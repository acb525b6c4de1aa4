"""Rationals as M-atoms, nonconvergent Cauchy sequences of rationals as m-atoms.

Sequences are symbolic: a limit ``q + r*sqrt(d)`` (irrational because d is
square-free and r != 0) together with a vanishing tail shape.  Term n is

    a_n = q + r*R_n + TAIL_AMPLITUDE * tail(n)

where R_n is a floor approximation of sqrt(d) with error below
``|tail(n)| / (10**12 * |r|)``.  Every term is an exact rational,
``|a_n - limit| <= |tail(n)|``, and two sequences differ by a null sequence
exactly when their limits coincide, which is how ``seq_equiv`` decides ∼.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import Sequence

from .errors import ResolutionError, ValidationError
from .universe import Atom, Universe

TAILS = {
    "inv_n": lambda n: Fraction(1, n),
    "inv_n2": lambda n: Fraction(1, n * n),
    "alt_inv_n": lambda n: Fraction((-1) ** n, n),
    "pow_half": lambda n: Fraction(1, 2 ** n),
}
TAIL_AMPLITUDE = Fraction(1, 10**8)
_CORE_PRECISION = 10**12

ORACLE_DENOMINATOR = 10**9
MIN_LIMIT_GAP = Fraction(4, 10**6)
CAUCHY_SAMPLE = tuple(range(1, 31)) + (50, 100, 1000)


def is_squarefree(d: int) -> bool:
    if d < 1:
        return False
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


def sqrt_interval(d: int, denominator: int) -> tuple[Fraction, Fraction]:
    """Certified enclosure [lo, hi] of sqrt(d) with the given denominator."""
    k = math.isqrt(d * denominator * denominator)
    lo = Fraction(k, denominator)
    if k * k == d * denominator * denominator:
        return lo, lo
    return lo, Fraction(k + 1, denominator)


@dataclass(frozen=True)
class LimitDescriptor:
    q: Fraction
    r: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q))
        object.__setattr__(self, "r", Fraction(self.r))

    @classmethod
    def canonical(cls, q, r, d: int) -> "LimitDescriptor":
        """Move square factors of d into r (sqrt(8) -> 2*sqrt(2))."""
        r = Fraction(r)
        k = 2
        while k * k <= d:
            while d % (k * k) == 0:
                d //= k * k
                r *= k
            k += 1
        return cls(Fraction(q), r, d)

    @cached_property
    def _canonical(self) -> "LimitDescriptor":
        return LimitDescriptor.canonical(self.q, self.r, self.d)

    def canonicalize(self) -> "LimitDescriptor":
        return self._canonical

    def interval(self, denominator: int = ORACLE_DENOMINATOR) -> tuple[Fraction, Fraction]:
        lo, hi = sqrt_interval(self.d, denominator)
        a, b = self.q + self.r * lo, self.q + self.r * hi
        return (a, b) if a <= b else (b, a)

    def __str__(self):
        return f"{self.q}+{self.r}*sqrt({self.d})"


@dataclass(frozen=True)
class MSequence:
    limit: LimitDescriptor
    tail: str = "inv_n"
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def tail_term(self, n: int) -> Fraction:
        return TAILS[self.tail](n)

    def tail_bound(self, n: int) -> Fraction:
        return abs(self.tail_term(n))

    def term(self, n: int) -> Fraction:
        if n < 1:
            raise ValueError("sequences are indexed from 1")
        hit = self._cache.get(n)
        if hit is not None:
            return hit
        L = self.limit
        tau = self.tail_term(n)
        K = -(-_CORE_PRECISION * abs(L.r).numerator * tau.denominator
              // (abs(L.r).denominator * abs(tau.numerator)))
        R = Fraction(math.isqrt(L.d * K * K), K)
        value = L.q + L.r * R + TAIL_AMPLITUDE * tau
        self._cache[n] = value
        return value


def validate_sequence(s: MSequence) -> bool:
    """Check the descriptor clauses and certify the Cauchy/limit bounds on a sample."""
    L = s.limit
    if not isinstance(L.d, int) or isinstance(L.d, bool) or L.d <= 1:
        raise ValidationError(f"d must be an integer > 1, got {L.d!r}")
    if not is_squarefree(L.d):
        raise ValidationError(f"d must be square-free, got {L.d}")
    if L.r == 0:
        raise ValidationError("r must be nonzero (r = 0 gives a sequence converging in Q)")
    if s.tail not in TAILS:
        raise ValidationError(f"unknown tail shape {s.tail!r}; expected one of {', '.join(TAILS)}")
    for n in CAUCHY_SAMPLE:
        for m in CAUCHY_SAMPLE:
            if m <= n:
                continue
            if abs(s.term(n) - s.term(m)) > 2 * s.tail_bound(n):
                raise ValidationError(f"Cauchy certificate fails at n={n}, m={m}")
        bound = s.tail_bound(n)
        lo, hi = L.interval(10 * math.ceil(abs(L.r) / bound) + 1)
        a = s.term(n)
        if max(abs(a - lo), abs(a - hi)) > bound:
            raise ValidationError(f"term {n} is not within the tail bound of the limit")
    return True


def seq_equiv(a: MSequence, b: MSequence) -> bool:
    """a ∼ b: the difference sequence tends to 0, i.e. the limits coincide."""
    return a.limit.canonicalize() == b.limit.canonicalize()


@dataclass(frozen=True)
class RationalUniverseSpec:
    rationals: tuple[Fraction, ...] = ()
    sequences: tuple[MSequence, ...] = ()
    # (id, members, zfu-or-None).  A member is a handle ("r<i>", "s<i>", an
    # earlier qset id) or an int indexing rationals followed by sequences.
    qsets: tuple = ()


def rational_handle(i: int) -> str:
    return f"r{i}"


def sequence_handle(i: int) -> str:
    return f"s{i}"


def check_resolution(limits: Sequence[LimitDescriptor]):
    """Distinct limits must be separated by more than MIN_LIMIT_GAP."""
    boxes = sorted({L: L.interval() for L in limits}.values())
    for (lo1, hi1), (lo2, hi2) in zip(boxes, boxes[1:]):
        if lo2 - hi1 <= MIN_LIMIT_GAP:
            raise ResolutionError(
                f"limits near {float(lo1):.9f} and {float(lo2):.9f} are closer than {float(MIN_LIMIT_GAP)}")


def build_universe(spec: RationalUniverseSpec) -> Universe:
    for i, s in enumerate(spec.sequences):
        try:
            validate_sequence(s)
        except ValidationError as exc:
            raise ValidationError(f"sequences[{i}]: {exc}") from None
    check_resolution([s.limit for s in spec.sequences])
    atoms = [Atom(rational_handle(i), "M", f"Q:{v}") for i, v in enumerate(spec.rationals)]
    atoms += [Atom(sequence_handle(i), "m", f"L:{s.limit.canonicalize()}")
              for i, s in enumerate(spec.sequences)]
    qsets = []
    for k, (qid, members, zfu) in enumerate(spec.qsets):
        resolved = []
        for m in members:
            if isinstance(m, int) and not isinstance(m, bool):
                if not 0 <= m < len(atoms):
                    raise ValidationError(f"qsets[{k}]: atom index {m} out of range")
                m = atoms[m].id
            resolved.append(m)
        qsets.append((qid, resolved, zfu))
    try:
        return Universe(atoms, qsets)
    except ValidationError as exc:
        raise ValidationError(f"qsets: {exc}") from None


# -- JSON -------------------------------------------------------------------

def _rational(text, where) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise ValidationError(f"{where}: expected a rational string 'p/q'")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"{where}: {text!r} is not a rational") from None


def spec_from_json(doc: dict) -> RationalUniverseSpec:
    if not isinstance(doc, dict):
        raise ValidationError("spec document must be a JSON object")
    if doc.get("format", 1) != 1:
        raise ValidationError(f"unsupported spec format {doc.get('format')!r}")
    rationals = tuple(_rational(v, f"rationals[{i}]") for i, v in enumerate(doc.get("rationals", [])))
    seqs = []
    for i, e in enumerate(doc.get("sequences", [])):
        where = f"sequences[{i}]"
        if not isinstance(e, dict):
            raise ValidationError(f"{where}: expected an object")
        d = e.get("d")
        if isinstance(d, bool) or not isinstance(d, int):
            raise ValidationError(f"{where}.d: expected an integer")
        limit = LimitDescriptor(_rational(e.get("q", "0"), f"{where}.q"), _rational(e.get("r"), f"{where}.r"), d)
        seqs.append(MSequence(limit, e.get("tail", "inv_n")))
    qsets = []
    for i, q in enumerate(doc.get("qsets", [])):
        try:
            qsets.append((q["id"], list(q["members"]), q.get("zfu")))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"qsets[{i}]: missing field {exc}") from None
    return RationalUniverseSpec(rationals, tuple(seqs), tuple(qsets))


def load_spec(path) -> RationalUniverseSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON: {exc}") from None
    try:
        return spec_from_json(doc)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def demo_spec() -> RationalUniverseSpec:
    """The bundled demo: 2 rationals and 4 sequences in three ∼-classes."""
    from importlib.resources import files

    doc = json.loads(files("qsetlab.data").joinpath("rational_demo.json").read_text(encoding="utf-8"))
    return spec_from_json(doc)
