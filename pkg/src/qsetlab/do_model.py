"""Systems of ontologically distinguishable particles and their interpretation.

A particle is the ordered pair ``(x, lam)`` of an intrinsic state and a
hidden value; its scale (micro/macro) is a predicate on the pair, not part
of it.  ``interpret`` compiles a system satisfying D1-D6 into a
:class:`~qsetlab.universe.Universe`: micro particles become m-atoms, macro
particles M-atoms, the intrinsic state becomes the species tag (so ≡ is
physical indistinguishability) and handle identity is pair equality.
"""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InterpretationError, ValidationError
from .universe import POWER_BOUND, Atom, Universe, power_qset

MICRO = "micro"
MACRO = "macro"
AXIOMS = ("D1", "D2", "D3", "D4", "D5", "D6")


@dataclass(frozen=True, order=True)
class Quantity:
    name: str
    value: Fraction
    unit: str = ""

    def __str__(self):
        return f"{self.name}={self.value}{' ' + self.unit if self.unit else ''}"


@dataclass(frozen=True)
class IntrinsicState:
    """Measured values of state-independent properties, sorted by property name."""

    values: tuple[Quantity, ...]

    def __post_init__(self):
        vals = tuple(sorted(self.values))
        names = [q.name for q in vals]
        if len(set(names)) != len(names):
            raise ValidationError(f"intrinsic state repeats a property: {names}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def of(cls, **props) -> "IntrinsicState":
        """``IntrinsicState.of(mass=("511/1000", "MeV"), charge=-1)``."""
        qs = []
        for name, v in props.items():
            value, unit = v if isinstance(v, tuple) else (v, "")
            qs.append(Quantity(name, Fraction(value), unit))
        return cls(tuple(qs))

    def tag(self) -> str:
        return ";".join(map(str, self.values)) or "<empty>"


@dataclass(frozen=True)
class Particle:
    x: IntrinsicState
    lam: Fraction
    scale: frozenset = field(default=frozenset({MICRO}), compare=False)

    @property
    def micro(self) -> bool:
        return MICRO in self.scale

    @property
    def macro(self) -> bool:
        return MACRO in self.scale


def particle(x: IntrinsicState, lam, scale=MICRO) -> Particle:
    if isinstance(scale, str):
        scale = (scale,)
    scale = frozenset(scale)
    if scale - {MICRO, MACRO}:
        raise ValidationError(f"unknown scale tag(s) {sorted(scale - {MICRO, MACRO})}")
    return Particle(x, Fraction(lam), scale)


@dataclass(frozen=True)
class DOSystem:
    """⟨λ, X, P, m, M⟩.  ``lam[i-1]`` is λ_i; particles are numbered from 1."""

    n: int
    lam: tuple[Fraction, ...]
    X: tuple[IntrinsicState, ...]
    P: tuple[Particle, ...]

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "lam", tuple(Fraction(v) for v in self.lam))
        object.__setattr__(self, "X", tuple(self.X))
        object.__setattr__(self, "P", tuple(self.P))
        if len(self.lam) != self.n:
            raise ValidationError(f"lambda must be total on 1..{self.n}, got {len(self.lam)} values")
        seen = {}
        for i, p in enumerate(self.P, 1):
            if p in seen:
                raise ValidationError(f"particles {seen[p]} and {i} are the same ordered pair")
            seen[p] = i

    @property
    def image(self) -> frozenset:
        """Λ_N."""
        return frozenset(self.lam)


@dataclass(frozen=True)
class AxiomVerdict:
    axiom: str
    holds: bool
    witness: tuple | None = None  # 1-based particle numbers, or (i, j) for D1
    detail: str = ""

    def __post_init__(self):
        if not self.holds and self.witness is None:
            raise ValueError("a failing verdict needs a witness")

    def to_json(self) -> dict:
        return {"axiom": self.axiom, "holds": self.holds,
                "witness": list(self.witness) if self.witness else None, "detail": self.detail}


# -- relations --------------------------------------------------------------

def phys_indist(p: Particle, q: Particle) -> bool:
    """p ≐ q: same intrinsic state, whatever the hidden values."""
    return p.x == q.x


def onto_indist(p: Particle, q: Particle) -> bool:
    """Equality of the ordered pairs."""
    return p.x == q.x and p.lam == q.lam


def _require_particles(s: DOSystem, ps: Iterable[Particle]):
    members = set(s.P)
    for p in ps:
        if p not in members:
            raise ValidationError(f"particle {p} is not in the system")


def pdot_class(s: DOSystem, p: Particle) -> tuple[Particle, ...]:
    """Maximal set of particles physically indistinguishable from p."""
    _require_particles(s, [p])
    return tuple(q for q in s.P if phys_indist(p, q))


def set_phys_indist(s: DOSystem, A: Iterable[Particle], B: Iterable[Particle]) -> bool:
    A, B = set(A), set(B)
    _require_particles(s, A | B)
    return all(phys_indist(p, q) for p in A for q in B) and len(A) == len(B)


# -- axioms -----------------------------------------------------------------

def check_d1(s: DOSystem) -> AxiomVerdict:
    first = {}
    for i, v in enumerate(s.lam, 1):
        if v in first:
            return AxiomVerdict("D1", False, (first[v], i), f"λ_{first[v]} = λ_{i} = {v}")
        first[v] = i
    assert len(s.image) == s.n
    return AxiomVerdict("D1", True, detail=f"#Λ_N = #N = {s.n}")


def check_d2(s: DOSystem) -> AxiomVerdict:
    X, image = set(s.X), s.image
    for i, p in enumerate(s.P, 1):
        if p.x not in X:
            return AxiomVerdict("D2", False, (i,), f"particle {i}: intrinsic state not in X")
        if p.lam not in image:
            return AxiomVerdict("D2", False, (i,), f"particle {i}: hidden value {p.lam} not in Λ_N")
    strict = len(s.P) < len(X) * len(image)
    return AxiomVerdict("D2", True, detail="P ⊊ X × Λ_N" if strict else "P = X × Λ_N (inclusion not strict)")


def _pairs(s: DOSystem):
    return itertools.combinations(enumerate(s.P, 1), 2)


def check_d3(s: DOSystem) -> AxiomVerdict:
    for (i, p), (j, q) in _pairs(s):
        if p.lam == q.lam and p.x != q.x:
            return AxiomVerdict("D3", False, (i, j), f"particles {i} and {j} share λ = {p.lam}")
    # with D3 and P a set, a shared hidden value means the same particle
    return AxiomVerdict("D3", True, detail="shared hidden value implies same particle")


def check_d4(s: DOSystem) -> AxiomVerdict:
    for (i, p), (j, q) in _pairs(s):
        if p.macro and q.macro and phys_indist(p, q) and not onto_indist(p, q):
            return AxiomVerdict("D4", False, (i, j), f"macro particles {i} and {j} are ≐ but distinct")
    return AxiomVerdict("D4", True)


def check_d5(s: DOSystem) -> AxiomVerdict:
    for (i, p), (j, q) in _pairs(s):
        if phys_indist(p, q) and not onto_indist(p, q) and not (p.micro and q.micro):
            return AxiomVerdict("D5", False, (i, j), f"particles {i} and {j} are ≐, distinct, not both micro")
    return AxiomVerdict("D5", True)


def check_d6(s: DOSystem) -> AxiomVerdict:
    for i, p in enumerate(s.P, 1):
        if p.micro == p.macro:
            what = "both micro and macro" if p.micro else "neither micro nor macro"
            return AxiomVerdict("D6", False, (i,), f"particle {i} is {what}")
    return AxiomVerdict("D6", True)


CHECKS = {"D1": check_d1, "D2": check_d2, "D3": check_d3,
          "D4": check_d4, "D5": check_d5, "D6": check_d6}


def check_all(s: DOSystem, axioms: Sequence[str] = AXIOMS) -> list[AxiomVerdict]:
    return [CHECKS[a](s) for a in axioms]


# -- interpretation ---------------------------------------------------------

def particle_handle(i: int) -> str:
    return f"p{i}"


def interpret(s: DOSystem, bound: int = POWER_BOUND) -> Universe:
    """Compile a valid system into a universe.

    Besides one atom per particle the universe holds every ≐-class as a qset
    (``cls<k>``), the pair {p≐, q≐} for every two classes (``wp<k>_<l>``),
    and the power qset of every class of at most ``bound`` particles.
    """
    failing = [v for v in check_all(s) if not v.holds]
    if failing:
        raise InterpretationError(failing)
    atoms = [Atom(particle_handle(i), "m" if p.micro else "M", p.x.tag())
             for i, p in enumerate(s.P, 1)]
    u = Universe(atoms)
    groups: dict = {}
    for i, p in enumerate(s.P, 1):
        groups.setdefault(p.x, []).append(particle_handle(i))
    groups = list(groups.values())
    u, cls = u.with_qsets(groups, [f"cls{k}" for k in range(1, len(groups) + 1)])
    specs, names = [], []
    for k, l in itertools.combinations_with_replacement(range(len(cls)), 2):
        specs.append({cls[k], cls[l]})
        names.append(f"wp{k + 1}_{l + 1}")
    u, _ = u.with_qsets(specs, names)
    for k, h in enumerate(cls):
        if len(groups[k]) <= bound:
            u, _ = power_qset(u, h, bound)
    return u


# -- generation -------------------------------------------------------------

_UNITS = (("mass", "MeV"), ("charge", "e"), ("spin", "hbar"))


def _random_state(rng: random.Random) -> IntrinsicState:
    return IntrinsicState((
        Quantity("mass", Fraction(rng.randrange(1, 10**5), 1000), "MeV"),
        Quantity("charge", Fraction(rng.randrange(-2, 3), rng.choice((1, 3))), "e"),
        Quantity("spin", Fraction(rng.randrange(0, 4), 2), "hbar"),
    ))


def gen_do(n: int, species_count: int, micro_fraction=1, seed: int = 0) -> DOSystem:
    """Random system satisfying D1-D6 by construction; deterministic per seed.

    ``round(micro_fraction * n)`` particles are micro and share the first
    ``species_count - n_macro`` intrinsic states; each macro particle gets a
    state of its own.
    """
    if not isinstance(n, int) or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    if not isinstance(species_count, int) or species_count < 1:
        raise ValidationError(f"species count must be positive, got {species_count!r}")
    frac = Fraction(str(micro_fraction)) if isinstance(micro_fraction, float) else Fraction(micro_fraction)
    if not 0 <= frac <= 1:
        raise ValidationError(f"micro fraction must lie in [0, 1], got {micro_fraction}")
    n_micro = int(frac * n + Fraction(1, 2))
    n_macro = n - n_micro
    needed = n_macro + (1 if n_micro else 0)
    if needed > species_count:
        raise ValidationError(
            f"{n_macro} macro particles need distinct states plus one for micro particles; "
            f"only {species_count} available")
    rng = random.Random(seed)
    lam: list[Fraction] = []
    while len(lam) < n:
        v = Fraction(rng.randrange(1, 10**6), rng.randrange(1, 100))
        if v not in lam:
            lam.append(v)
    pool: list[IntrinsicState] = []
    while len(pool) < species_count:
        st = _random_state(rng)
        if st not in pool:
            pool.append(st)
    micro_states = pool[:species_count - n_macro]
    macro_states = pool[species_count - n_macro:]
    scales = [MICRO] * n_micro + [MACRO] * n_macro
    rng.shuffle(scales)
    particles = []
    macro_iter = iter(macro_states)
    for i, sc in enumerate(scales):
        x = rng.choice(micro_states) if sc == MICRO else next(macro_iter)
        particles.append(Particle(x, lam[i], frozenset({sc})))
    return DOSystem(n, tuple(lam), tuple(pool), tuple(particles))


# -- JSON -------------------------------------------------------------------

def _parse_quantity(name: str, text) -> Quantity:
    if isinstance(text, int) and not isinstance(text, bool):
        return Quantity(name, Fraction(text))
    if not isinstance(text, str):
        raise ValidationError(f"property {name!r}: expected a string like '1/2 MeV'")
    parts = text.split()
    if not parts or len(parts) > 2:
        raise ValidationError(f"property {name!r}: cannot parse {text!r}")
    try:
        value = Fraction(parts[0])
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"property {name!r}: {parts[0]!r} is not a rational") from None
    return Quantity(name, value, parts[1] if len(parts) == 2 else "")


def _state_from_json(obj) -> IntrinsicState:
    if not isinstance(obj, dict):
        raise ValidationError("intrinsic state must be an object of name -> 'value unit'")
    return IntrinsicState(tuple(_parse_quantity(k, v) for k, v in obj.items()))


def _rational(text, where: str) -> Fraction:
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise ValidationError(f"{where}: expected a rational string 'p/q'")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"{where}: {text!r} is not a rational") from None


def system_from_json(doc: dict) -> DOSystem:
    """Read a system document.

    In ``P`` entries, ``x`` is a 0-based index into ``X`` or an inline state
    object, ``lam`` is the subscript i of λ_i (1..n) or a rational string
    giving the hidden value directly, and ``scale`` is "micro", "macro" or a
    list of those tags.
    """
    if not isinstance(doc, dict):
        raise ValidationError("system document must be a JSON object")
    if doc.get("format", 1) != 1:
        raise ValidationError(f"unsupported system format {doc.get('format')!r}")
    try:
        n, lam_doc, X_doc, P_doc = doc["n"], doc["lambda"], doc["X"], doc["P"]
    except KeyError as exc:
        raise ValidationError(f"missing field {exc}") from None
    lam = tuple(_rational(v, f"lambda[{i}]") for i, v in enumerate(lam_doc))
    X = tuple(_state_from_json(x) for x in X_doc)
    particles = []
    for k, entry in enumerate(P_doc):
        where = f"P[{k}]"
        if not isinstance(entry, dict):
            raise ValidationError(f"{where}: expected an object")
        xr, lr = entry.get("x"), entry.get("lam")
        if isinstance(xr, int) and not isinstance(xr, bool):
            if not 0 <= xr < len(X):
                raise ValidationError(f"{where}: x index {xr} out of range")
            x = X[xr]
        else:
            x = _state_from_json(xr)
        if isinstance(lr, int) and not isinstance(lr, bool):
            if not 1 <= lr <= len(lam):
                raise ValidationError(f"{where}: lam subscript {lr} outside 1..{len(lam)}")
            value = lam[lr - 1]
        else:
            value = _rational(lr, f"{where}.lam")
        particles.append(particle(x, value, entry.get("scale", MICRO)))
    return DOSystem(n, lam, X, tuple(particles))


def _state_to_json(st: IntrinsicState) -> dict:
    return {q.name: f"{q.value}{' ' + q.unit if q.unit else ''}" for q in st.values}


def system_to_json(s: DOSystem) -> dict:
    X_index = {x: i for i, x in enumerate(s.X)}
    lam_index = {}
    for i, v in enumerate(s.lam, 1):
        lam_index.setdefault(v, i)
    P = []
    for p in s.P:
        scale = sorted(p.scale)
        P.append({
            "x": X_index[p.x] if p.x in X_index else _state_to_json(p.x),
            "lam": lam_index[p.lam] if p.lam in lam_index else str(p.lam),
            "scale": scale[0] if len(scale) == 1 else scale,
        })
    return {"format": 1, "n": s.n, "lambda": [str(v) for v in s.lam],
            "X": [_state_to_json(x) for x in s.X], "P": P}


def load_system(path) -> DOSystem:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON: {exc}") from None
    try:
        return system_from_json(doc)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def dump_system(s: DOSystem, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(system_to_json(s), fh, indent=1)
        fh.write("\n")
