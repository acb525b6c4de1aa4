"""Finite quasi-set universes and the constructive quasi-set operations.

A universe is an immutable, well-founded collection of m-atoms, M-atoms and
qsets addressed by string handles.  Handles play the part of hidden labels:
indistinguishability (``indist``) is computed from species tags and member
structure only, never from handle identity; handle identity surfaces solely
through ``ext_eq`` on qsets and M-atoms.

Operations that build new qsets return ``(new_universe, handle)``.  A new
qset whose member collection already exists in the universe is not
duplicated; the existing handle is returned instead (such qsets are
extensionally equal, so the theory cannot tell them apart either).
"""
from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ResourceError, UnsupportedError, ValidationError

__all__ = [
    "Atom", "QSet", "Universe", "NotApplicable", "POWER_BOUND",
    "indist", "ext_eq", "qc", "weak_pair", "weak_singleton", "separation",
    "power_qset", "sub_qset_of_card", "quotient", "classes", "sim", "qsim",
    "ordered_qpair", "check_quasi_function", "close", "class_representatives",
    "load_universe", "universe_to_json", "dump_universe",
]

POWER_BOUND = 16

MICRO = "m"
MACRO = "M"


@dataclass(frozen=True)
class Atom:
    id: str
    kind: str  # MICRO or MACRO
    species: str


@dataclass(frozen=True)
class QSet:
    id: str
    members: tuple[str, ...]
    zfu: bool


class _NotApplicable:
    """Verdict of ``ext_eq`` when an argument is an m-atom.

    Deliberately not usable as a boolean, so it cannot be mistaken for False.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __bool__(self):
        raise TypeError("NotApplicable has no truth value: =E is undefined on m-atoms")

    def __repr__(self):
        return "NotApplicable"


NotApplicable = _NotApplicable()


class Universe:
    """Immutable finite structure of atoms and qsets.

    ``atoms`` is an iterable of :class:`Atom`; ``qsets`` an iterable of
    :class:`QSet` or ``(id, members, zfu)`` triples where ``zfu=None`` means
    "derive from the transitive closure".  Qsets may only reference entities
    declared before them, which makes membership well-founded.
    """

    __slots__ = ("_entities", "_index", "_sig", "_mset", "_has_m", "_rank",
                 "_by_members", "_species", "_n_qsets")

    def __init__(self, atoms: Iterable[Atom] = (), qsets: Iterable = ()):
        self._entities: tuple = ()
        self._index: dict[str, int] = {}
        self._sig: dict = {}
        self._mset: dict[str, frozenset] = {}
        self._has_m: dict[str, bool] = {}
        self._rank: dict[str, int] = {}
        self._by_members: dict[frozenset, str] = {}
        self._species: dict[str, str] = {}
        self._n_qsets = 0

        entities = []
        for atom in atoms:
            if not isinstance(atom, Atom):
                atom = Atom(*atom)
            self._add_atom(atom, entities)
        for q in qsets:
            if isinstance(q, QSet):
                qid, members, zfu = q.id, q.members, q.zfu
            else:
                qid, members, zfu = q
            self._add_qset(qid, members, zfu, entities)
        self._entities = tuple(entities)

    # -- construction helpers -------------------------------------------------

    def _check_new_id(self, eid):
        if not isinstance(eid, str) or not eid:
            raise ValidationError(f"entity id must be a non-empty string, got {eid!r}")
        if eid in self._index:
            raise ValidationError(f"duplicate entity id {eid!r}")

    def _add_atom(self, atom: Atom, entities: list):
        if self._n_qsets:
            raise ValidationError(f"atom {atom.id!r} declared after a qset")
        self._check_new_id(atom.id)
        if atom.kind not in (MICRO, MACRO):
            raise ValidationError(f"atom {atom.id!r}: kind must be 'm' or 'M', got {atom.kind!r}")
        if not isinstance(atom.species, str) or not atom.species:
            raise ValidationError(f"atom {atom.id!r}: species must be a non-empty string")
        prev = self._species.setdefault(atom.species, atom.kind)
        if prev != atom.kind:
            raise ValidationError(
                f"species {atom.species!r} used by both m-atoms and M-atoms (atom {atom.id!r})")
        self._index[atom.id] = len(entities)
        self._sig[atom.id] = (atom.kind, atom.species)
        self._has_m[atom.id] = atom.kind == MICRO
        self._rank[atom.id] = 0
        entities.append(atom)

    def _add_qset(self, qid, members, zfu, entities: list) -> QSet:
        self._check_new_id(qid)
        members = list(members)
        seen = set()
        for h in members:
            if h not in self._index:
                raise ValidationError(
                    f"qset {qid!r}: member {h!r} is unknown or declared later")
            if h in seen:
                raise ValidationError(f"qset {qid!r}: duplicate member {h!r}")
            seen.add(h)
        index = self._index
        ordered = tuple(sorted(members, key=index.__getitem__))
        has_m = any(self._has_m[h] for h in ordered)
        if zfu is None:
            zfu = not has_m
        elif zfu and has_m:
            raise ValidationError(
                f"qset {qid!r} is flagged zfu but its transitive closure contains an m-atom")
        q = QSet(qid, ordered, bool(zfu))
        mset = frozenset(ordered)
        index[qid] = len(entities)
        self._mset[qid] = mset
        self._has_m[qid] = has_m
        self._rank[qid] = 1 + max((self._rank[h] for h in ordered), default=0)
        sig = self._sig
        self._sig[qid] = ("Q", frozenset(Counter(sig[h] for h in ordered).items()))
        self._by_members.setdefault(mset, qid)
        self._n_qsets += 1
        entities.append(q)
        return q

    def _fresh_id(self, counter: list) -> str:
        while True:
            cand = f"_q{counter[0]}"
            counter[0] += 1
            if cand not in self._index:
                return cand

    def with_qsets(self, specs: Sequence[Iterable[str]],
                   names: Sequence[str | None] | None = None) -> tuple["Universe", list[str]]:
        """Extend with several qsets at once.

        ``specs`` holds member collections; ``names`` optionally gives a
        preferred id per spec (ignored when taken or when the qset already
        exists).  Later specs may reference handles created by earlier ones.
        Returns the new universe and one handle per spec.
        """
        new = Universe.__new__(Universe)
        new._index = dict(self._index)
        new._sig = dict(self._sig)
        new._mset = dict(self._mset)
        new._has_m = dict(self._has_m)
        new._rank = dict(self._rank)
        new._by_members = dict(self._by_members)
        new._species = self._species
        new._n_qsets = self._n_qsets
        entities = list(self._entities)
        handles = []
        counter = [len(entities)]
        names = list(names) if names is not None else [None] * len(specs)
        for members, name in zip(specs, names):
            members = list(members)
            existing = new._by_members.get(frozenset(members))
            if existing is not None:
                handles.append(existing)
                continue
            if name is None or name in new._index:
                name = new._fresh_id(counter)
            new._add_qset(name, members, None, entities)
            handles.append(name)
        new._entities = tuple(entities)
        return new, handles

    def with_qset(self, members: Iterable[str], name: str | None = None) -> tuple["Universe", str]:
        u, (h,) = self.with_qsets([members], [name])
        return u, h

    # -- accessors ------------------------------------------------------------

    @property
    def entities(self) -> tuple:
        return self._entities

    @property
    def handles(self) -> tuple[str, ...]:
        return tuple(e.id for e in self._entities)

    @property
    def atoms(self) -> tuple[Atom, ...]:
        return tuple(e for e in self._entities if isinstance(e, Atom))

    @property
    def qsets(self) -> tuple[QSet, ...]:
        return tuple(e for e in self._entities if isinstance(e, QSet))

    @property
    def qset_handles(self) -> tuple[str, ...]:
        return tuple(e.id for e in self._entities if isinstance(e, QSet))

    @property
    def species_table(self) -> dict[str, str]:
        return dict(self._species)

    def __len__(self):
        return len(self._entities)

    def __contains__(self, h):
        return h in self._index

    def __iter__(self):
        return iter(self.handles)

    def __repr__(self):
        return f"<Universe atoms={len(self._entities) - self._n_qsets} qsets={self._n_qsets}>"

    def require(self, *handles: str):
        for h in handles:
            if h not in self._index:
                raise ValidationError(f"unknown handle {h!r}")

    def entity(self, h: str):
        self.require(h)
        return self._entities[self._index[h]]

    def index(self, h: str) -> int:
        self.require(h)
        return self._index[h]

    def kind(self, h: str) -> str:
        """'m', 'M' or 'Q'."""
        e = self.entity(h)
        return e.kind if isinstance(e, Atom) else "Q"

    def is_qset(self, h: str) -> bool:
        return self.kind(h) == "Q"

    def is_atom(self, h: str) -> bool:
        return self.kind(h) != "Q"

    def is_zfu(self, h: str) -> bool:
        e = self.entity(h)
        return isinstance(e, QSet) and e.zfu

    def members(self, h: str) -> tuple[str, ...]:
        e = self.entity(h)
        if not isinstance(e, QSet):
            raise ValidationError(f"{h!r} is an atom, not a qset")
        return e.members

    def member_set(self, h: str) -> frozenset:
        self.members(h)
        return self._mset[h]

    def contains(self, x: str, t: str) -> bool:
        """``t ∈ x``; atoms have no members."""
        self.require(t)
        return t in self._mset.get(x, ()) if self.is_qset(x) else False

    def signature(self, h: str):
        """Canonical ≡-class key: species for atoms, member-class multiset for qsets."""
        self.require(h)
        return self._sig[h]

    def rank(self, h: str) -> int:
        self.require(h)
        return self._rank[h]

    def closure_has_m_atom(self, h: str) -> bool:
        self.require(h)
        return self._has_m[h]

    def find_qset(self, members: Iterable[str]) -> str | None:
        return self._by_members.get(frozenset(members))


# -- ≡ and =E ---------------------------------------------------------------

def indist(u: Universe, a: str, b: str) -> bool:
    """Indistinguishability ≡.

    Atoms: same kind and species.  Qsets: their quotients match class by
    class under QSim (the weak-extensionality antecedent), which reduces to
    equality of member-class multisets.  Atom vs qset is always False.
    """
    u.require(a, b)
    return u._sig[a] == u._sig[b]


def ext_eq(u: Universe, a: str, b: str):
    """Extensional equality; returns NotApplicable if either side is an m-atom."""
    ka, kb = u.kind(a), u.kind(b)
    if ka == MICRO or kb == MICRO:
        return NotApplicable
    if ka == "Q" and kb == "Q":
        return u._mset[a] == u._mset[b]
    if ka == MACRO and kb == MACRO:
        return indist(u, a, b)
    return False


def qc(u: Universe, x: str) -> int:
    if not u.is_qset(x):
        raise ValidationError(f"qc is undefined on atom {x!r}")
    return len(u._mset[x])


# -- constructive axioms ----------------------------------------------------

def weak_pair(u: Universe, x: str, y: str) -> tuple[Universe, str]:
    """[x, y]: every entity indistinguishable from x or from y."""
    u.require(x, y)
    keys = {u._sig[x], u._sig[y]}
    return u.with_qset([t for t in u.handles if u._sig[t] in keys])


def weak_singleton(u: Universe, x: str) -> tuple[Universe, str]:
    """[x] = [x, x]; not a singleton, its quasi-cardinal may exceed 1."""
    return weak_pair(u, x, x)


def separation(u: Universe, x: str, alpha, var: str | None = None,
               valuation: dict | None = None) -> tuple[Universe, str]:
    """[t ∈ x : alpha(t)].

    ``alpha`` is a Formula or formula text with exactly one free variable
    besides the names bound in ``valuation`` (parameters such as constants).
    """
    from .formula import evaluate, free_vars, parse

    if isinstance(alpha, str):
        alpha = parse(alpha)
    members = u.members(x)
    valuation = dict(valuation or {})
    free = free_vars(alpha) - set(valuation)
    if var is None:
        if len(free) != 1:
            raise ValidationError(
                f"separation formula must have exactly one free variable, has {sorted(free)}")
        (var,) = free
    elif free - {var}:
        raise ValidationError(f"separation formula has extra free variables {sorted(free - {var})}")
    kept = [t for t in members if evaluate(u, alpha, {**valuation, var: t})]
    return u.with_qset(kept)


def power_qset(u: Universe, x: str, bound: int = POWER_BOUND) -> tuple[Universe, str]:
    """P(x): one sub-qset per sub-collection of x's members, 2**qc(x) in all."""
    members = u.members(x)
    n = len(members)
    if n > bound:
        raise ResourceError(f"power_qset: qc({x})={n} exceeds bound {bound}")
    subsets = [tuple(m for i, m in enumerate(members) if mask >> i & 1)
               for mask in range(1 << n)]
    u2, subs = u.with_qsets(subsets)
    return u2.with_qset(subs)


def sub_qset_of_card(u: Universe, x: str, beta: int) -> tuple[Universe, str]:
    """A sub-qset of x with quasi-cardinal beta: the first beta members in handle order."""
    members = u.members(x)
    if not isinstance(beta, int) or beta < 0:
        raise ValidationError(f"beta must be a natural number, got {beta!r}")
    if beta > len(members):
        raise ValidationError(f"beta={beta} exceeds qc({x})={len(members)}")
    return u.with_qset(members[:beta])


def classes(u: Universe, x: str) -> list[tuple[str, ...]]:
    """≡-classes of x's members, ordered by first member; x must hold atoms only."""
    members = u.members(x)
    if any(u.is_qset(m) for m in members):
        raise UnsupportedError(f"quotient of {x!r}: only qsets of atoms are supported")
    groups: dict = {}
    for m in members:
        groups.setdefault(u._sig[m], []).append(m)
    return [tuple(g) for g in groups.values()]


def quotient(u: Universe, x: str) -> tuple[Universe, str]:
    """x/≡ materialized as a qset of class qsets."""
    cls = classes(u, x)
    u2, hs = u.with_qsets(cls)
    return u2.with_qset(hs)


def sim(u: Universe, x: str, y: str) -> bool:
    mx, my = u.members(x), u.members(y)
    return all(indist(u, z, t) for z in mx for t in my)


def qsim(u: Universe, x: str, y: str) -> bool:
    return sim(u, x, y) and qc(u, x) == qc(u, y)


def ordered_qpair(u: Universe, x: str, y: str) -> tuple[Universe, str]:
    """Kuratowski-style ⟨x, y⟩ = [[x], [x, y]] built from weak pairs."""
    u, sx = weak_singleton(u, x)
    u, pxy = weak_pair(u, x, y)
    return weak_pair(u, sx, pxy)


def check_quasi_function(u: Universe, pairs: Iterable[tuple[str, str]]) -> bool:
    """True iff indistinguishable inputs always map to indistinguishable outputs."""
    pairs = list(pairs)
    for a, b in pairs:
        u.require(a, b)
    for (a, b), (a2, b2) in itertools.product(pairs, repeat=2):
        if indist(u, a, a2) and not indist(u, b, b2):
            return False
    return True


def class_representatives(u: Universe) -> list[str]:
    """First handle (in universe order) of every ≡-class."""
    seen = {}
    for h in u.handles:
        seen.setdefault(u._sig[h], h)
    return list(seen.values())


def close(u: Universe, ops: Sequence[str] = ("weakpair",), max_card: int = 4,
          rounds: int = 1) -> Universe:
    """Witness closure: add weak pairs and/or power qsets.

    Each round applies ``ops`` in order.  ``weakpair`` adds [x, y] for every
    pair of ≡-class representatives (other pairs yield the same qsets);
    ``power`` adds P(x) for every qset with qc(x) <= max_card.
    """
    if max_card > POWER_BOUND:
        raise ResourceError(f"max_card {max_card} exceeds power bound {POWER_BOUND}")
    for op in ops:
        if op not in ("weakpair", "power"):
            raise ValidationError(f"unknown closure op {op!r}")
    for _ in range(rounds):
        for op in ops:
            if op == "weakpair":
                reps = class_representatives(u)
                specs = []
                for i, x in enumerate(reps):
                    for y in reps[i:]:
                        keys = {u._sig[x], u._sig[y]}
                        specs.append(tuple(t for t in u.handles if u._sig[t] in keys))
                u, _ = u.with_qsets(specs)
            else:
                for x in u.qset_handles:
                    if qc(u, x) <= max_card:
                        u, _ = power_qset(u, x)
    return u


# -- JSON -------------------------------------------------------------------

def universe_from_json(doc: dict) -> Universe:
    if not isinstance(doc, dict):
        raise ValidationError("universe document must be a JSON object")
    if doc.get("format", 1) != 1:
        raise ValidationError(f"unsupported universe format {doc.get('format')!r}")
    atoms = []
    for i, a in enumerate(doc.get("atoms", [])):
        try:
            atoms.append(Atom(a["id"], a["kind"], a["species"]))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"atoms[{i}]: missing field {exc}") from None
    qsets = []
    for i, q in enumerate(doc.get("qsets", [])):
        try:
            qsets.append((q["id"], list(q["members"]), q.get("zfu")))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"qsets[{i}]: missing field {exc}") from None
    return Universe(atoms, qsets)


def load_universe(path) -> Universe:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON: {exc}") from None
    try:
        return universe_from_json(doc)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def universe_to_json(u: Universe) -> dict:
    return {
        "format": 1,
        "atoms": [{"id": a.id, "kind": a.kind, "species": a.species} for a in u.atoms],
        "qsets": [{"id": q.id, "members": list(q.members), "zfu": q.zfu} for q in u.qsets],
    }


def dump_universe(u: Universe, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(universe_to_json(u), fh, indent=1)
        fh.write("\n")
