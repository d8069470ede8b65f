"""Boolean relations, promise relations, families and instances.

A k-tuple (x_1, ..., x_k) over {0,1} is stored as the integer
``sum(x_i << (i - 1))``: coordinate 1 is the lowest-order bit.  This
convention is used everywhere in the package, including truth tables.
"""

from __future__ import annotations

import enum
import os
from math import comb
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    ArityMismatch,
    LengthMismatch,
    PromiseViolation,
    SchemaError,
    TooLarge,
    WeightOutOfRange,
)

__all__ = [
    "MAX_ARITY",
    "Relation",
    "PromiseRelation",
    "SymmetricProfile",
    "Family",
    "Instance",
    "Side",
    "Status",
    "tuple_index",
    "index_tuple",
    "popcount",
    "make_ham",
    "symmetric_profile",
    "flip",
    "negate",
    "make_family",
    "make_instance",
    "evaluate",
    "find_satisfying",
    "brute_force_status",
    "default_max_vars",
    "NOT",
    "SET_ZERO",
    "SET_ONE",
]

MAX_ARITY = 16
_DEFAULT_MAX_VARS = 20


def default_max_vars() -> int:
    """Variable cap for exhaustive search (``PCSP_MAX_VARS`` overrides)."""
    return int(os.environ.get("PCSP_MAX_VARS", _DEFAULT_MAX_VARS))


def popcount(x: int) -> int:
    return bin(x).count("1")


def tuple_index(bits: Sequence[int]) -> int:
    idx = 0
    for i, b in enumerate(bits):
        if b not in (0, 1):
            raise ValueError(f"tuple entries must be 0 or 1, got {b!r}")
        idx |= b << i
    return idx


def index_tuple(idx: int, k: int) -> tuple[int, ...]:
    return tuple((idx >> i) & 1 for i in range(k))


def _check_arity(k: int) -> None:
    if not isinstance(k, int) or k < 1:
        raise ArityMismatch(f"arity must be a positive integer, got {k!r}")
    if k > MAX_ARITY:
        raise TooLarge(f"arity {k} exceeds cap {MAX_ARITY}")


@dataclass(frozen=True)
class Relation:
    """Subset of {0,1}^k given by the indices of its members."""

    arity: int
    members: frozenset[int]

    def __post_init__(self) -> None:
        _check_arity(self.arity)
        members = frozenset(self.members)
        top = 1 << self.arity
        for m in members:
            if not 0 <= m < top:
                raise ValueError(f"member index {m} out of range for arity {self.arity}")
        object.__setattr__(self, "members", members)

    @classmethod
    def from_tuples(cls, k: int, tuples: Iterable[Sequence[int]]) -> Relation:
        members = set()
        for t in tuples:
            if len(t) != k:
                raise ArityMismatch(f"tuple {tuple(t)} has length {len(t)}, expected {k}")
            members.add(tuple_index(t))
        return cls(k, frozenset(members))

    @classmethod
    def full(cls, k: int) -> Relation:
        return cls(k, frozenset(range(1 << k)))

    @classmethod
    def empty(cls, k: int) -> Relation:
        return cls(k, frozenset())

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.sorted_members)

    def __contains__(self, item) -> bool:
        if isinstance(item, int):
            return item in self.members
        if len(item) != self.arity:
            return False
        return tuple_index(item) in self.members

    @cached_property
    def sorted_members(self) -> tuple[int, ...]:
        return tuple(sorted(self.members))

    def tuples(self) -> list[tuple[int, ...]]:
        return [index_tuple(m, self.arity) for m in self.sorted_members]

    @cached_property
    def mask(self) -> np.ndarray:
        """Boolean lookup table of length 2^k."""
        table = np.zeros(1 << self.arity, dtype=bool)
        if self.members:
            table[list(self.members)] = True
        return table

    def issubset(self, other: Relation) -> bool:
        if self.arity != other.arity:
            raise ArityMismatch(f"arities {self.arity} and {other.arity} differ")
        return self.members <= other.members

    @property
    def is_empty(self) -> bool:
        return not self.members

    def weights(self) -> frozenset[int]:
        return frozenset(popcount(m) for m in self.members)

    def __repr__(self) -> str:
        prof = symmetric_profile(self)
        if prof is not None:
            return f"Ham_{self.arity}({sorted(prof.weights)})"
        return f"Relation({self.arity}, {self.tuples()})"


@dataclass(frozen=True)
class SymmetricProfile:
    arity: int
    weights: frozenset[int]

    def __post_init__(self) -> None:
        weights = frozenset(self.weights)
        for w in weights:
            if not 0 <= w <= self.arity:
                raise WeightOutOfRange(f"weight {w} outside 0..{self.arity}")
        object.__setattr__(self, "weights", weights)


def make_ham(k: int, S: Iterable[int]) -> Relation:
    """Tuples of length k whose Hamming weight lies in S."""
    _check_arity(k)
    S = frozenset(S)
    for w in S:
        if not 0 <= w <= k:
            raise WeightOutOfRange(f"weight {w} outside 0..{k}")
    return Relation(k, frozenset(x for x in range(1 << k) if popcount(x) in S))


def symmetric_profile(r: Relation) -> SymmetricProfile | None:
    weights = r.weights()
    expected = sum(comb(r.arity, w) for w in weights)
    if expected != len(r.members):
        return None
    return SymmetricProfile(r.arity, weights)


def flip(r: Relation, coords: Iterable[int]) -> Relation:
    """XOR every member with the indicator of ``coords`` (1-based)."""
    e = 0
    for c in coords:
        if not 1 <= c <= r.arity:
            raise ValueError(f"coordinate {c} outside 1..{r.arity}")
        e |= 1 << (c - 1)
    return Relation(r.arity, frozenset(m ^ e for m in r.members))


def negate(r: Relation) -> Relation:
    return flip(r, range(1, r.arity + 1))


@dataclass(frozen=True)
class PromiseRelation:
    p: Relation
    q: Relation

    def __post_init__(self) -> None:
        if self.p.arity != self.q.arity:
            raise ArityMismatch(f"p has arity {self.p.arity}, q has arity {self.q.arity}")
        if not self.p.members <= self.q.members:
            bad = min(self.p.members - self.q.members)
            raise PromiseViolation(
                f"p-member {index_tuple(bad, self.p.arity)} is not in q"
            )

    @classmethod
    def ham(cls, k: int, S: Iterable[int], T: Iterable[int]) -> PromiseRelation:
        return cls(make_ham(k, S), make_ham(k, T))

    @classmethod
    def csp(cls, r: Relation) -> PromiseRelation:
        return cls(r, r)

    @property
    def arity(self) -> int:
        return self.p.arity

    @property
    def is_symmetric(self) -> bool:
        return symmetric_profile(self.p) is not None and symmetric_profile(self.q) is not None

    def profiles(self) -> tuple[SymmetricProfile, SymmetricProfile] | None:
        sp, sq = symmetric_profile(self.p), symmetric_profile(self.q)
        if sp is None or sq is None:
            return None
        return sp, sq

    def flip(self, coords: Iterable[int]) -> PromiseRelation:
        coords = list(coords)
        return PromiseRelation(flip(self.p, coords), flip(self.q, coords))

    def flip_all(self) -> PromiseRelation:
        return self.flip(range(1, self.arity + 1))

    def __repr__(self) -> str:
        return f"({self.p!r}, {self.q!r})"


NOT = PromiseRelation.ham(2, {1}, {1})
SET_ZERO = PromiseRelation.ham(1, {0}, {0})
SET_ONE = PromiseRelation.ham(1, {1}, {1})


@dataclass(frozen=True)
class Family:
    """Ordered, named list of promise relations."""

    relations: tuple[PromiseRelation, ...]
    names: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "relations", tuple(self.relations))
        object.__setattr__(self, "names", tuple(self.names))
        if not self.relations:
            raise ValueError("a family needs at least one relation")
        if len(self.names) != len(self.relations):
            raise ValueError("one name per relation is required")
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate relation names in {self.names}")

    def __len__(self) -> int:
        return len(self.relations)

    def __iter__(self) -> Iterator[PromiseRelation]:
        return iter(self.relations)

    def items(self) -> Iterator[tuple[str, PromiseRelation]]:
        return zip(self.names, self.relations)

    def index(self, name_or_index: str | int) -> int:
        if isinstance(name_or_index, int):
            if not 0 <= name_or_index < len(self.relations):
                raise IndexError(f"relation index {name_or_index} out of range")
            return name_or_index
        try:
            return self.names.index(name_or_index)
        except ValueError:
            raise KeyError(f"no relation named {name_or_index!r}") from None

    def __getitem__(self, key: str | int) -> PromiseRelation:
        return self.relations[self.index(key)]

    @property
    def max_arity(self) -> int:
        return max(pr.arity for pr in self.relations)

    @cached_property
    def contains_not(self) -> bool:
        return NOT in self.relations

    @cached_property
    def contains_set_zero(self) -> bool:
        return SET_ZERO in self.relations

    @cached_property
    def contains_set_one(self) -> bool:
        return SET_ONE in self.relations

    @cached_property
    def symmetric(self) -> bool:
        return all(pr.is_symmetric for pr in self.relations)

    def extend(self, relations: Sequence[PromiseRelation], names: Sequence[str]) -> Family:
        """Append relations, skipping any that are already present."""
        rels, nms = list(self.relations), list(self.names)
        for pr, name in zip(relations, names):
            if pr in rels:
                continue
            while name in nms:
                name += "'"
            rels.append(pr)
            nms.append(name)
        return Family(tuple(rels), tuple(nms))

    def map(self, fn) -> Family:
        return Family(tuple(fn(pr) for pr in self.relations), self.names)


def _default_name(pr: PromiseRelation, i: int) -> str:
    if pr == NOT:
        return "NOT"
    if pr == SET_ZERO:
        return "SET-ZERO"
    if pr == SET_ONE:
        return "SET-ONE"
    return f"R{i}"


def make_family(
    relations: Sequence[PromiseRelation], names: Sequence[str] | None = None
) -> Family:
    relations = tuple(relations)
    if names is None:
        names = []
        for i, pr in enumerate(relations):
            name = _default_name(pr, i)
            names.append(name if name not in names else f"R{i}")
    return Family(relations, tuple(names))


@dataclass(frozen=True)
class Instance:
    """Clauses are (relation index, variable tuple); repeated variables allowed."""

    num_vars: int
    clauses: tuple[tuple[int, tuple[int, ...]], ...]

    def __post_init__(self) -> None:
        if self.num_vars < 0:
            raise ValueError("num_vars must be non-negative")
        clauses = tuple((int(r), tuple(int(v) for v in vs)) for r, vs in self.clauses)
        for ci, (_, vs) in enumerate(clauses):
            for v in vs:
                if not 0 <= v < self.num_vars:
                    raise SchemaError(f"clause {ci}: variable {v} outside 0..{self.num_vars - 1}")
        object.__setattr__(self, "clauses", clauses)

    def check(self, fam: Family) -> None:
        for ci, (r, vs) in enumerate(self.clauses):
            if not 0 <= r < len(fam):
                raise SchemaError(f"clause {ci}: relation index {r} out of range")
            if len(vs) != fam.relations[r].arity:
                raise ArityMismatch(
                    f"clause {ci}: {len(vs)} variables for relation "
                    f"{fam.names[r]!r} of arity {fam.relations[r].arity}"
                )

    def __len__(self) -> int:
        return len(self.clauses)


def make_instance(
    fam: Family, num_vars: int, clauses: Iterable[tuple[str | int, Sequence[int]]]
) -> Instance:
    inst = Instance(num_vars, tuple((fam.index(r), tuple(vs)) for r, vs in clauses))
    inst.check(fam)
    return inst


class Side(str, enum.Enum):
    P = "p"
    Q = "q"


class Status(str, enum.Enum):
    PSAT = "psat"
    QUNSAT = "qunsat"
    GAP = "gap"


def _side_rel(pr: PromiseRelation, side: Side) -> Relation:
    return pr.p if Side(side) is Side.P else pr.q


def evaluate(fam: Family, inst: Instance, a: Sequence[int], side: Side | str) -> bool:
    if len(a) != inst.num_vars:
        raise LengthMismatch(f"assignment has length {len(a)}, instance has {inst.num_vars} variables")
    for r, vs in inst.clauses:
        rel = _side_rel(fam.relations[r], side)
        idx = 0
        for j, v in enumerate(vs):
            idx |= (a[v] & 1) << j
        if idx not in rel.members:
            return False
    return True


_CHUNK_BITS = 16
_NUMPY_MAX_VARS = 20


def find_satisfying(
    fam: Family, inst: Instance, side: Side | str, max_vars: int | None = None
) -> tuple[int, ...] | None:
    """Exhaustive search for an assignment satisfying one side of the instance.

    Small instances are scanned in vectorised chunks; larger ones fall back to
    a depth-first search that checks each clause once its variables are set.
    Both routes are complete.
    """
    inst.check(fam)
    cap = default_max_vars() if max_vars is None else max_vars
    n = inst.num_vars
    if n > cap:
        raise TooLarge(f"{n} variables exceed the exhaustive-search cap {cap}")
    rels = [_side_rel(fam.relations[r], side) for r, _ in inst.clauses]
    if any(rel.is_empty for rel in rels):
        return None
    if n <= _NUMPY_MAX_VARS:
        return _scan(rels, inst, n)
    return _dfs(rels, inst, n)


def _scan(rels: list[Relation], inst: Instance, n: int) -> tuple[int, ...] | None:
    total = 1 << n
    chunk = 1 << _CHUNK_BITS
    for start in range(0, total, chunk):
        a = np.arange(start, min(total, start + chunk), dtype=np.int64)
        ok = np.ones(a.shape, dtype=bool)
        for rel, (_, vs) in zip(rels, inst.clauses):
            idx = np.zeros(a.shape, dtype=np.int64)
            for j, v in enumerate(vs):
                idx |= ((a >> v) & 1) << j
            ok &= rel.mask[idx]
            if not ok.any():
                break
        hits = np.flatnonzero(ok)
        if hits.size:
            return index_tuple(int(a[hits[0]]), n)
    return None


def _dfs(rels: list[Relation], inst: Instance, n: int) -> tuple[int, ...] | None:
    by_last: list[list[tuple[Relation, tuple[int, ...]]]] = [[] for _ in range(n)]
    for rel, (_, vs) in zip(rels, inst.clauses):
        by_last[max(vs)].append((rel, vs))
    bits = [0] * n

    def ok_at(v: int) -> bool:
        for rel, vs in by_last[v]:
            idx = 0
            for j, u in enumerate(vs):
                idx |= bits[u] << j
            if idx not in rel.members:
                return False
        return True

    # iterative DFS: choice[v] is the next value to try at depth v
    choice = [0] * (n + 1)
    v = 0
    while v >= 0:
        if v == n:
            return tuple(bits)
        if choice[v] > 1:
            choice[v] = 0
            v -= 1
            continue
        bits[v] = choice[v]
        choice[v] += 1
        if ok_at(v):
            v += 1
    return None


def brute_force_status(fam: Family, inst: Instance, max_vars: int | None = None) -> Status:
    if find_satisfying(fam, inst, Side.P, max_vars) is not None:
        return Status.PSAT
    if find_satisfying(fam, inst, Side.Q, max_vars) is None:
        return Status.QUNSAT
    return Status.GAP
