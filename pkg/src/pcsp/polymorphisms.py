"""Boolean functions as weak polymorphisms: images, closures and enumeration.

A function of arity L is stored as its truth table, an integer whose bit x is
f(x) (inputs indexed with coordinate 1 as the lowest bit, as for relations).
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import (
    EmptyRelation,
    EmptyWeights,
    EvenArity,
    NotFolded,
    TooLarge,
    UnsupportedNonSymmetric,
)
from .relations import (
    Family,
    PromiseRelation,
    Relation,
    SymmetricProfile,
    index_tuple,
    make_ham,
    negate,
    popcount,
    symmetric_profile,
)

__all__ = [
    "MAX_FUN_ARITY",
    "BoolFun",
    "FamilyKind",
    "Flags",
    "make_named",
    "dictator",
    "identity",
    "image",
    "check_weak_polymorphism",
    "is_weak_polymorphism",
    "project",
    "flags",
    "closure_parity",
    "closure_meet",
    "closure_join",
    "closure_symmetric",
    "named_images",
    "brute_force_closure",
    "has_family",
    "fixing_set",
    "is_c_fixing",
    "enumerate_weak_polymorphisms",
    "default_enum_arity",
    "stack_columns",
]

MAX_FUN_ARITY = 20
_DEFAULT_ENUM_ARITY = 4
_MAX_COMBOS = 1 << 22


def default_enum_arity() -> int:
    """Largest arity enumerated by default (``PCSP_ENUM_ARITY`` overrides)."""
    return int(os.environ.get("PCSP_ENUM_ARITY", _DEFAULT_ENUM_ARITY))


@dataclass(frozen=True)
class BoolFun:
    arity: int
    table: int

    def __post_init__(self) -> None:
        if not 1 <= self.arity <= MAX_FUN_ARITY:
            raise TooLarge(f"function arity {self.arity} outside 1..{MAX_FUN_ARITY}")
        if not 0 <= self.table < (1 << (1 << self.arity)):
            raise ValueError("truth table has bits beyond 2^arity entries")

    @classmethod
    def from_callable(cls, L: int, fn: Callable[[tuple[int, ...]], int]) -> BoolFun:
        table = 0
        for x in range(1 << L):
            if fn(index_tuple(x, L)):
                table |= 1 << x
        return cls(L, table)

    @classmethod
    def from_values(cls, L: int, values: Sequence[int]) -> BoolFun:
        if len(values) != 1 << L:
            raise ValueError(f"expected {1 << L} table entries, got {len(values)}")
        return cls(L, sum((v & 1) << x for x, v in enumerate(values)))

    def at(self, x: int) -> int:
        return (self.table >> x) & 1

    def __call__(self, *bits: int) -> int:
        if len(bits) == 1 and not isinstance(bits[0], int):
            bits = tuple(bits[0])
        if len(bits) != self.arity:
            raise ValueError(f"expected {self.arity} arguments, got {len(bits)}")
        return self.at(sum(b << i for i, b in enumerate(bits)))

    @cached_property
    def values(self) -> np.ndarray:
        x = np.arange(1 << self.arity, dtype=np.int64)
        bits = np.array([(self.table >> int(i)) & 1 for i in x], dtype=np.int64)
        return bits

    def negate(self) -> BoolFun:
        return BoolFun(self.arity, self.table ^ ((1 << (1 << self.arity)) - 1))

    def to_hex(self) -> str:
        """Hex digits in input order: digit j holds entries 4j..4j+3, entry 4j lowest."""
        ndigits = max(1, (1 << self.arity) // 4)
        return "".join(format((self.table >> (4 * j)) & 15, "x") for j in range(ndigits))

    @classmethod
    def from_hex(cls, L: int, text: str) -> BoolFun:
        ndigits = max(1, (1 << L) // 4)
        if len(text) != ndigits:
            raise ValueError(f"arity {L} needs {ndigits} hex digits, got {len(text)}")
        table = 0
        for j, ch in enumerate(text):
            table |= int(ch, 16) << (4 * j)
        return cls(L, table)

    def __repr__(self) -> str:
        return f"BoolFun({self.arity}, {self.to_hex()})"


class FamilyKind(str, enum.Enum):
    ZERO = "zero"
    ONE = "one"
    AND = "and"
    OR = "or"
    PAR = "par"
    MAJ = "maj"
    AT = "at"
    ANTI_PAR = "anti-par"
    ANTI_MAJ = "anti-maj"
    ANTI_AT = "anti-at"
    ANTI_AND = "anti-and"
    ANTI_OR = "anti-or"

    @property
    def is_anti(self) -> bool:
        return self.value.startswith("anti-")

    @property
    def base(self) -> FamilyKind:
        return FamilyKind(self.value[5:]) if self.is_anti else self

    @property
    def odd_only(self) -> bool:
        return self.base in (FamilyKind.PAR, FamilyKind.MAJ, FamilyKind.AT)

    def anti(self) -> FamilyKind:
        return FamilyKind("anti-" + self.value)


def _base_value(kind: FamilyKind, x: tuple[int, ...]) -> int:
    if kind is FamilyKind.ZERO:
        return 0
    if kind is FamilyKind.ONE:
        return 1
    if kind is FamilyKind.AND:
        return int(all(x))
    if kind is FamilyKind.OR:
        return int(any(x))
    if kind is FamilyKind.PAR:
        return sum(x) & 1
    if kind is FamilyKind.MAJ:
        return int(2 * sum(x) > len(x))
    if kind is FamilyKind.AT:
        return int(sum(b if i % 2 == 0 else -b for i, b in enumerate(x)) > 0)
    raise ValueError(kind)


def make_named(kind: FamilyKind, L: int) -> BoolFun:
    kind = FamilyKind(kind)
    if kind.odd_only and L % 2 == 0:
        raise EvenArity(f"{kind.value} is defined for odd arity only, got {L}")
    base = kind.base
    f = BoolFun.from_callable(L, lambda x: _base_value(base, x))
    return f.negate() if kind.is_anti else f


def dictator(L: int, i: int) -> BoolFun:
    """The projection onto coordinate i (1-based)."""
    if not 1 <= i <= L:
        raise ValueError(f"coordinate {i} outside 1..{L}")
    return BoolFun(L, sum(1 << x for x in range(1 << L) if (x >> (i - 1)) & 1))


def identity() -> BoolFun:
    return dictator(1, 1)


def stack_columns(members: Sequence[int], k: int, L: int) -> np.ndarray:
    """All L-row stacks of members, as an array of shape (len^L, k) of column indices.

    Row-major over choices: the first chosen member varies slowest.
    """
    m = len(members)
    if m ** L > _MAX_COMBOS:
        raise TooLarge(f"{m}^{L} member stacks exceed the cap {_MAX_COMBOS}")
    mem = np.asarray(members, dtype=np.int64)
    bits = (mem[:, None] >> np.arange(k)) & 1
    cols = np.zeros((1, k), dtype=np.int64)
    for j in range(L):
        cols = (cols[:, None, :] | (bits[None, :, :] << j)).reshape(-1, k)
    return cols


def _outputs(f: BoolFun, cols: np.ndarray) -> np.ndarray:
    vals = f.values[cols]
    return (vals << np.arange(cols.shape[1])).sum(axis=1)


def image(f: BoolFun, r: Relation) -> Relation:
    """The relation obtained by applying f coordinatewise to every L-stack of members."""
    if r.is_empty:
        return Relation.empty(r.arity)
    cols = stack_columns(r.sorted_members, r.arity, f.arity)
    out = np.unique(_outputs(f, cols))
    return Relation(r.arity, frozenset(int(x) for x in out))


def check_weak_polymorphism(f: BoolFun, pr: PromiseRelation) -> list[tuple[int, ...]] | None:
    """None if f maps every stack of p-members into q, else a violating stack."""
    if pr.p.is_empty:
        return None
    members = pr.p.sorted_members
    cols = stack_columns(members, pr.arity, f.arity)
    bad = np.flatnonzero(~pr.q.mask[_outputs(f, cols)])
    if bad.size == 0:
        return None
    choice = np.unravel_index(int(bad[0]), (len(members),) * f.arity)
    return [index_tuple(members[int(c)], pr.arity) for c in choice]


def is_weak_polymorphism(f: BoolFun, fam: Family | Iterable[PromiseRelation]) -> bool:
    return all(check_weak_polymorphism(f, pr) is None for pr in fam)


def project(f: BoolFun, pi: Sequence[int], R: int | None = None) -> BoolFun:
    """The minor y -> f(y_pi(1), ..., y_pi(L)); pi lists 1-based targets."""
    if len(pi) != f.arity:
        raise ValueError(f"map has {len(pi)} entries, function has arity {f.arity}")
    R = max(pi) if R is None else R
    if any(not 1 <= t <= R for t in pi):
        raise ValueError(f"map targets must lie in 1..{R}")
    table = 0
    for y in range(1 << R):
        x = 0
        for i, t in enumerate(pi):
            x |= ((y >> (t - 1)) & 1) << i
        table |= f.at(x) << y
    return BoolFun(R, table)


@dataclass(frozen=True)
class Flags:
    folded: bool
    idempotent: bool
    degenerate: bool


def flags(f: BoolFun) -> Flags:
    full = (1 << f.arity) - 1
    folded = all(f.at(x) != f.at(x ^ full) for x in range(1 << f.arity))
    return Flags(
        folded=folded,
        idempotent=f.at(0) == 0 and f.at(full) == 1,
        degenerate=f.at(0) == f.at(full),
    )


def _fixpoint(members: frozenset[int], op: Callable[[int, int], int]) -> frozenset[int]:
    closed = set(members)
    while True:
        new = {op(a, b) for a in closed for b in closed} - closed
        if not new:
            return frozenset(closed)
        closed |= new


def closure_parity(r: Relation) -> Relation:
    """Least superset of r closed under XOR of any three members."""
    if r.is_empty:
        raise EmptyRelation("parity closure of an empty relation")
    closed = set(r.members)
    while True:
        diffs = {a ^ b for a in closed for b in closed}
        new = {z ^ d for z in closed for d in diffs} - closed
        if not new:
            return Relation(r.arity, frozenset(closed))
        closed |= new


def closure_meet(r: Relation) -> Relation:
    return Relation(r.arity, _fixpoint(r.members, lambda a, b: a & b))


def closure_join(r: Relation) -> Relation:
    return Relation(r.arity, _fixpoint(r.members, lambda a, b: a | b))


def closure_symmetric(kind: FamilyKind, prof: SymmetricProfile) -> SymmetricProfile:
    """Closed-form union over odd L of the Maj_L or AT_L images of Ham_k(S)."""
    kind = FamilyKind(kind)
    k, S = prof.arity, prof.weights
    if not S:
        raise EmptyWeights("closure of an empty weight set")
    if S <= {0, k}:
        return prof
    if kind is FamilyKind.MAJ:
        lo, hi = 2 * min(S) - k + 1, 2 * max(S) - 1
        return SymmetricProfile(k, frozenset(w for w in range(k + 1) if lo <= w <= hi))
    if kind is FamilyKind.AT:
        if len(S) == 1:
            return SymmetricProfile(k, frozenset(range(1, k)))
        return SymmetricProfile(k, frozenset(range(k + 1)))
    raise ValueError(f"no closed form for {kind.value}")


def named_images(kind: FamilyKind, r: Relation, L_max: int) -> dict[int, Relation]:
    """Images of r under the named function of every arity L <= L_max.

    Instead of enumerating |r|^L stacks, the columns are tracked through a
    per-coordinate summary (parity, count, alternating sum, running AND/OR),
    which is all the named functions depend on.  For symmetric r the state
    vectors are kept sorted, which is sound because the reachable set is
    closed under coordinate permutations.
    """
    kind = FamilyKind(kind)
    base = kind.base
    k = r.arity
    result: dict[int, Relation] = {}
    if r.is_empty:
        for L in range(1, L_max + 1):
            if not (kind.odd_only and L % 2 == 0):
                result[L] = Relation.empty(k)
        return result
    members = r.sorted_members
    symmetric = symmetric_profile(r) is not None

    if base in (FamilyKind.ZERO, FamilyKind.ONE):
        const = (1 << k) - 1 if base is FamilyKind.ONE else 0
        for L in range(1, L_max + 1):
            result[L] = Relation(k, frozenset({const}))
    elif base in (FamilyKind.PAR, FamilyKind.AND, FamilyKind.OR):
        op = {
            FamilyKind.PAR: lambda a, b: a ^ b,
            FamilyKind.AND: lambda a, b: a & b,
            FamilyKind.OR: lambda a, b: a | b,
        }[base]
        states = set(members)
        for L in range(1, L_max + 1):
            if L > 1:
                states = {op(s, x) for s in states for x in members}
            result[L] = Relation(k, frozenset(states))
    else:
        rows = [index_tuple(x, k) for x in members]
        states = {tuple([0] * k)}
        for L in range(1, L_max + 1):
            sign = 1 if L % 2 == 1 or base is FamilyKind.MAJ else -1
            nxt = set()
            for s in states:
                for row in rows:
                    t = tuple(a + sign * b for a, b in zip(s, row))
                    nxt.add(tuple(sorted(t)) if symmetric else t)
            states = nxt
            if L % 2 == 1:
                if base is FamilyKind.MAJ:
                    outs = {sum(1 << i for i, c in enumerate(s) if 2 * c > L) for s in states}
                else:
                    outs = {sum(1 << i for i, c in enumerate(s) if c > 0) for s in states}
                if symmetric:
                    weights = {popcount(o) for o in outs}
                    result[L] = make_ham(k, weights)
                else:
                    result[L] = Relation(k, frozenset(outs))
    if kind.odd_only:
        result = {L: rel for L, rel in result.items() if L % 2 == 1}
    if kind.is_anti:
        result = {L: negate(rel) for L, rel in result.items()}
    return result


def brute_force_closure(r: Relation, kind: FamilyKind, L_max: int) -> Relation:
    """Union of the named images of r over odd L <= L_max."""
    if L_max < 1 or L_max % 2 == 0:
        raise EvenArity(f"L_max must be odd and positive, got {L_max}")
    members: set[int] = set()
    for L, rel in named_images(kind, r, L_max).items():
        if L % 2 == 1:
            members |= rel.members
    return Relation(r.arity, frozenset(members))


def _base_holds(base: FamilyKind, p: Relation, q: Relation) -> bool:
    k = p.arity
    if base is FamilyKind.ZERO:
        return 0 in q.members
    if base is FamilyKind.ONE:
        return (1 << k) - 1 in q.members
    if base is FamilyKind.AND:
        return closure_meet(p).members <= q.members
    if base is FamilyKind.OR:
        return closure_join(p).members <= q.members
    if base is FamilyKind.PAR:
        return closure_parity(p).members <= q.members
    prof = symmetric_profile(p)
    if prof is None:
        raise UnsupportedNonSymmetric(
            f"{base.value} membership for all arities needs a symmetric p, got {p!r}"
        )
    closure = closure_symmetric(base, prof)
    return make_ham(k, closure.weights).members <= q.members


def has_family(fam: Family | Iterable[PromiseRelation], kind: FamilyKind) -> bool:
    """Whether every member of the named family (all admissible arities) is a weak polymorphism."""
    kind = FamilyKind(kind)
    for pr in fam:
        q = negate(pr.q) if kind.is_anti else pr.q
        if kind.is_anti and not pr.p.members <= q.members:
            return False
        if pr.p.is_empty:
            continue
        if not _base_holds(kind.base, pr.p, q):
            return False
    return True


def fixing_set(f: BoolFun, C: int) -> frozenset[int] | None:
    """Smallest coordinate set (size <= C, 1-based) whose zeroing forces f(0...0)."""
    base = f.at(0)
    bad = [x for x in range(1 << f.arity) if f.at(x) != base]
    for size in range(min(C, f.arity) + 1):
        for S in combinations(range(f.arity), size):
            mask = sum(1 << i for i in S)
            if all(x & mask for x in bad):
                return frozenset(i + 1 for i in S)
    return None


def is_c_fixing(f: BoolFun, C: int) -> frozenset[int] | None:
    if not flags(f).folded:
        raise NotFolded(f"{f!r} is not folded")
    return fixing_set(f, C)


def _stack_constraints(fam: Iterable[PromiseRelation], L: int) -> list[tuple[tuple[int, ...], frozenset[int]]]:
    """Distinct (column tuple, q) pairs: f must send the columns to a member of q."""
    seen: set[tuple[tuple[int, ...], Relation]] = set()
    out = []
    for pr in fam:
        if pr.p.is_empty:
            continue
        cols = np.unique(stack_columns(pr.p.sorted_members, pr.arity, L), axis=0)
        for row in cols:
            key = (tuple(int(c) for c in row), pr.q)
            if key not in seen:
                seen.add(key)
                out.append((key[0], pr.q.members))
    return out


def enumerate_weak_polymorphisms(
    fam: Family | Iterable[PromiseRelation],
    L: int,
    folded_only: bool = False,
    idempotent_only: bool = False,
    max_arity: int | None = None,
) -> list[BoolFun]:
    """All arity-L weak polymorphisms of every pair in fam, by backtracking over the table."""
    cap = default_enum_arity() if max_arity is None else max_arity
    if L > cap:
        raise TooLarge(f"enumeration at arity {L} exceeds cap {cap}")
    n = 1 << L
    full = n - 1
    constraints = _stack_constraints(fam, L)

    # decision order and forced entries
    fixed: dict[int, int] = {}
    if idempotent_only:
        fixed[0] = 0
        fixed[full] = 1
    decisions = []
    for x in range(n):
        if x in fixed:
            continue
        if folded_only and (x ^ full) < x:
            continue
        decisions.append(x)
    if folded_only:
        for x, v in list(fixed.items()):
            if fixed.get(x ^ full, 1 - v) != 1 - v:
                return []
            fixed[x ^ full] = 1 - v
        decisions = [x for x in decisions if x not in fixed]

    time = {x: -1 for x in fixed}
    for t, x in enumerate(decisions):
        time[x] = t
        if folded_only:
            time[x ^ full] = t
    checks: list[list[tuple[tuple[int, ...], frozenset[int]]]] = [[] for _ in range(len(decisions) + 1)]
    for cols, q in constraints:
        checks[max(time[c] for c in cols) + 1].append((cols, q))

    values = [0] * n
    for x, v in fixed.items():
        values[x] = v

    def consistent(slot: int) -> bool:
        for cols, q in checks[slot]:
            idx = 0
            for i, c in enumerate(cols):
                idx |= values[c] << i
            if idx not in q:
                return False
        return True

    found: list[BoolFun] = []
    if not consistent(0):
        return found

    def search(t: int) -> None:
        if t == len(decisions):
            found.append(BoolFun(L, sum(v << x for x, v in enumerate(values))))
            return
        x = decisions[t]
        for v in (0, 1):
            values[x] = v
            if folded_only:
                values[x ^ full] = 1 - v
            if consistent(t + 1):
                search(t + 1)

    search(0)
    found.sort(key=lambda f: f.table)
    return found
