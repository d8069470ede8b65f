"""Instance and family transformations: repetition removal, Label Cover long-code
gadgets, positive primitive promise definitions, Galois gadgets and finitization."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Hashable, Mapping, Sequence

import numpy as np

from .errors import (
    ArityMismatch,
    HypothesisFails,
    MissingIdentity,
    NoFixingSet,
    NotFolded,
    NotProjectionClosed,
    SchemaError,
    TooLarge,
    UnsatisfiedEdge,
)
from .polymorphisms import (
    BoolFun,
    stack_columns,
    check_weak_polymorphism,
    default_enum_arity,
    dictator,
    enumerate_weak_polymorphisms,
    fixing_set,
    project,
)
from .relations import Family, Instance, PromiseRelation, Relation

__all__ = [
    "EQUAL",
    "remove_repetition",
    "LabelCover",
    "LabelCoverGadget",
    "label_cover_gadget",
    "dictator_assignment",
    "Decoded",
    "decode_labeling",
    "Gadget",
    "identity_gadget",
    "apply_ppp_gadget",
    "check_ppp_bullets",
    "galois_gadget",
    "FunFamily",
    "ClosureReport",
    "family_closure_checks",
    "construct_gamma_from_family",
]

EQUAL = "EQUAL"
MAX_TABLE_ARITY = 12
MAX_GADGET_VARS = 22


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def add(self) -> int:
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                self.parent[rb] = ra
            else:
                self.parent[ra] = rb

    def relabel(self) -> list[int]:
        """Compact class labels in order of each class's smallest member."""
        labels: dict[int, int] = {}
        out = []
        for x in range(len(self.parent)):
            r = self.find(x)
            if r not in labels:
                labels[r] = len(labels)
            out.append(labels[r])
        return out


def remove_repetition(fam: Family, inst: Instance, domain_size: int = 2) -> Instance:
    """Repetition-free instance with domain_size * (max arity) copies of every variable.

    Each clause is replaced by all of its copy selections that use pairwise
    distinct variables.
    """
    inst.check(fam)
    c = domain_size * fam.max_arity
    clauses = []
    for r, vs in inst.clauses:
        for sel in product(range(c), repeat=len(vs)):
            new = tuple(v * c + s for v, s in zip(vs, sel))
            if len(set(new)) == len(new):
                clauses.append((r, new))
    return Instance(inst.num_vars * c, tuple(clauses))


@dataclass(frozen=True)
class LabelCover:
    """Bipartite projection game; pi maps right labels 1..R to left labels 1..L."""

    L: int
    R: int
    edges: tuple[tuple[Hashable, Hashable, tuple[int, ...]], ...]
    eta: float | None = None

    def __post_init__(self) -> None:
        edges = tuple((u, v, tuple(pi)) for u, v, pi in self.edges)
        for i, (_, _, pi) in enumerate(edges):
            if len(pi) != self.R:
                raise SchemaError(f"edge {i}: projection has {len(pi)} entries, expected {self.R}")
            if any(not 1 <= t <= self.L for t in pi):
                raise SchemaError(f"edge {i}: projection values must lie in 1..{self.L}")
        object.__setattr__(self, "edges", edges)

    @property
    def left(self) -> list[Hashable]:
        return list(dict.fromkeys(u for u, _, _ in self.edges))

    @property
    def right(self) -> list[Hashable]:
        return list(dict.fromkeys(v for _, v, _ in self.edges))

    def satisfied(self, sigma_u: Mapping, sigma_v: Mapping) -> int:
        return sum(1 for u, v, pi in self.edges if pi[sigma_v[v] - 1] == sigma_u[u])


@dataclass(frozen=True)
class LabelCoverGadget:
    lc: LabelCover
    fam: Family
    instance: Instance
    left_vars: Mapping[Hashable, tuple[int, ...]]
    right_vars: Mapping[Hashable, tuple[int, ...]]

    def table(self, a: Sequence[int], vertex: Hashable, side: str) -> BoolFun:
        vars_ = self.left_vars[vertex] if side == "left" else self.right_vars[vertex]
        arity = self.lc.L if side == "left" else self.lc.R
        return BoolFun.from_values(arity, [a[x] for x in vars_])


def label_cover_gadget(lc: LabelCover, fam: Family) -> LabelCoverGadget:
    """Long-code encoding: a truth table per vertex, polymorphism clauses, merged edge equalities."""
    if not fam.contains_not:
        raise NotFolded("the long-code gadget needs NOT in the family")
    if max(lc.L, lc.R) > MAX_TABLE_ARITY:
        raise TooLarge(f"label sizes exceed {MAX_TABLE_ARITY}")
    left, right = lc.left, lc.right
    nl, nr = 1 << lc.L, 1 << lc.R
    raw_left = {u: i * nl for i, u in enumerate(left)}
    offset = len(left) * nl
    raw_right = {v: offset + i * nr for i, v in enumerate(right)}
    uf = _UnionFind(offset + len(right) * nr)
    for u, v, pi in lc.edges:
        for x in range(nl):
            y = 0
            for i, t in enumerate(pi):
                y |= ((x >> (t - 1)) & 1) << i
            uf.union(raw_left[u] + x, raw_right[v] + y)
    label = uf.relabel()
    left_vars = {u: tuple(label[raw_left[u] + x] for x in range(nl)) for u in left}
    right_vars = {v: tuple(label[raw_right[v] + y] for y in range(nr)) for v in right}

    stacks = {}
    clauses = []
    seen = set()
    for tables, arity in ((left_vars, lc.L), (right_vars, lc.R)):
        for r, pr in enumerate(fam.relations):
            if pr.p.is_empty:
                continue
            key = (r, arity)
            if key not in stacks:
                stacks[key] = np.unique(stack_columns(pr.p.sorted_members, pr.arity, arity), axis=0)
            for vars_ in tables.values():
                for row in stacks[key]:
                    clause = (r, tuple(vars_[int(c)] for c in row))
                    if clause not in seen:
                        seen.add(clause)
                        clauses.append(clause)
    inst = Instance(max(label) + 1 if label else 0, tuple(clauses))
    return LabelCoverGadget(lc, fam, inst, left_vars, right_vars)


def dictator_assignment(gadget: LabelCoverGadget, sigma_u: Mapping, sigma_v: Mapping) -> tuple[int, ...]:
    """Set every table to the dictator of its vertex's label."""
    lc = gadget.lc
    for i, (u, v, pi) in enumerate(lc.edges):
        if pi[sigma_v[v] - 1] != sigma_u[u]:
            raise UnsatisfiedEdge(f"edge {i} ({u!r}, {v!r}) is not satisfied by the labeling")
    a = [-1] * gadget.instance.num_vars
    for tables, sigma in ((gadget.left_vars, sigma_u), (gadget.right_vars, sigma_v)):
        for w, vars_ in tables.items():
            for x, var in enumerate(vars_):
                bit = (x >> (sigma[w] - 1)) & 1
                if a[var] not in (-1, bit):
                    raise AssertionError("merged table entries disagree under a satisfying labeling")
                a[var] = bit
    return tuple(max(b, 0) for b in a)


@dataclass(frozen=True)
class Decoded:
    sigma_u: dict
    sigma_v: dict
    fraction: Fraction
    fixing_sets: dict
    intersecting: bool


_MAX_DECODE_PRODUCT = 1 << 16


def decode_labeling(gadget: LabelCoverGadget, a: Sequence[int], c_max: int) -> Decoded:
    """Read a labeling off the fixing sets of the tables, choosing the best-agreeing members."""
    lc = gadget.lc
    sets: dict = {}
    for side, tables in (("left", gadget.left_vars), ("right", gadget.right_vars)):
        for w in tables:
            f = gadget.table(a, w, side)
            S = fixing_set(f, c_max)
            if S is None:
                raise NoFixingSet(f"table of {side} vertex {w!r} has no fixing set of size <= {c_max}")
            sets[(side, w)] = sorted(S)
    keys = list(sets)
    sizes = [len(sets[k]) for k in keys]
    total = 1
    for s in sizes:
        total *= s

    def labeling(choice):
        su = {w: sets[(side, w)][c] for (side, w), c in zip(keys, choice) if side == "left"}
        sv = {w: sets[(side, w)][c] for (side, w), c in zip(keys, choice) if side == "right"}
        return su, sv

    if total <= _MAX_DECODE_PRODUCT:
        best = max(product(*(range(s) for s in sizes)), key=lambda ch: lc.satisfied(*labeling(ch)))
    else:
        # coordinate ascent from the smallest members
        best = [0] * len(keys)
        improved = True
        while improved:
            improved = False
            for i, s in enumerate(sizes):
                current = lc.satisfied(*labeling(best))
                for c in range(s):
                    trial = best[:i] + [c] + best[i + 1 :]
                    if lc.satisfied(*labeling(trial)) > current:
                        best, improved = trial, True
                        current = lc.satisfied(*labeling(best))
    su, sv = labeling(best)
    intersecting = all(
        set(sets[("left", u)]) & {pi[j - 1] for j in sets[("right", v)]} for u, v, pi in lc.edges
    )
    fraction = Fraction(lc.satisfied(su, sv), len(lc.edges)) if lc.edges else Fraction(1)
    return Decoded(su, sv, fraction, {k: frozenset(v) for k, v in sets.items()}, bool(intersecting))


@dataclass(frozen=True)
class Gadget:
    """Clauses over variables 0..arity-1 (the target tuple) and arity..arity+aux-1.

    Relation names refer to the defining family; ``EQUAL`` clauses identify
    two variables.
    """

    arity: int
    aux: int
    clauses: tuple[tuple[str, tuple[int, ...]], ...] = field(default=())

    def __post_init__(self) -> None:
        clauses = tuple((name, tuple(vs)) for name, vs in self.clauses)
        n = self.arity + self.aux
        for i, (name, vs) in enumerate(clauses):
            if any(not 0 <= v < n for v in vs):
                raise SchemaError(f"gadget clause {i}: variable outside 0..{n - 1}")
            if name == EQUAL and len(vs) != 2:
                raise SchemaError(f"gadget clause {i}: EQUAL takes two variables")
        object.__setattr__(self, "clauses", clauses)


def identity_gadget(name: str, arity: int) -> Gadget:
    return Gadget(arity, 0, ((name, tuple(range(arity))),))


def apply_ppp_gadget(
    gadgets: Mapping[str, Gadget], src: Family, dst: Family, inst: Instance
) -> Instance:
    """Replace every clause over src by its gadget over dst, with fresh auxiliaries."""
    inst.check(src)
    uf = _UnionFind(inst.num_vars)
    pending: list[tuple[int, tuple[int, ...]]] = []
    for ci, (r, vs) in enumerate(inst.clauses):
        name = src.names[r]
        if name not in gadgets:
            raise SchemaError(f"no gadget for relation {name!r}")
        g = gadgets[name]
        if g.arity != len(vs):
            raise ArityMismatch(f"clause {ci}: gadget for {name!r} has arity {g.arity}, clause has {len(vs)}")
        local = list(vs) + [uf.add() for _ in range(g.aux)]
        for gname, gvs in g.clauses:
            mapped = tuple(local[v] for v in gvs)
            if gname == EQUAL:
                uf.union(*mapped)
            else:
                rel = dst.index(gname)
                if dst.relations[rel].arity != len(mapped):
                    raise ArityMismatch(f"gadget clause over {gname!r} has wrong arity")
                pending.append((rel, mapped))
    label = uf.relabel()
    clauses = tuple((r, tuple(label[v] for v in vs)) for r, vs in pending)
    return Instance(max(label) + 1 if label else 0, clauses)


def _gadget_solutions(g: Gadget, fam: Family, side: str) -> np.ndarray:
    """Restrictions to the target variables of all assignments satisfying one side."""
    n = g.arity + g.aux
    if n > MAX_GADGET_VARS:
        raise TooLarge(f"gadget has {n} variables, cap is {MAX_GADGET_VARS}")
    a = np.arange(1 << n, dtype=np.int64)
    ok = np.ones(a.shape, dtype=bool)
    for name, vs in g.clauses:
        if name == EQUAL:
            ok &= ((a >> vs[0]) & 1) == ((a >> vs[1]) & 1)
            continue
        pr = fam[name]
        rel = pr.p if side == "p" else pr.q
        idx = np.zeros(a.shape, dtype=np.int64)
        for j, v in enumerate(vs):
            idx |= ((a >> v) & 1) << j
        ok &= rel.mask[idx]
    return np.unique(a[ok] & ((1 << g.arity) - 1))


def check_ppp_bullets(g: Gadget, fam: Family, target: PromiseRelation) -> tuple[bool, bool]:
    """(every p-tuple extends to a p-side solution, every q-side solution restricts into q)."""
    if g.arity != target.arity:
        raise ArityMismatch("gadget and target arities differ")
    p_restr = {int(x) for x in _gadget_solutions(g, fam, "p")}
    q_restr = {int(x) for x in _gadget_solutions(g, fam, "q")}
    return target.p.members <= p_restr, q_restr <= target.q.members


def galois_gadget(fam: Family, target: PromiseRelation, max_arity: int | None = None) -> Gadget:
    """Gadget defining target from fam, built from the table of an |target.p|-ary weak polymorphism."""
    m = len(target.p)
    if m == 0:
        raise ValueError("target has an empty p-side")
    cap = default_enum_arity() if max_arity is None else max_arity
    if m > cap:
        raise TooLarge(f"|target.p| = {m} exceeds the enumeration cap {cap}")
    for f in enumerate_weak_polymorphisms(fam, m, max_arity=cap):
        if check_weak_polymorphism(f, target) is not None:
            raise HypothesisFails(f"{f!r} is a weak polymorphism of the family but not of the target", f)
    k = target.arity
    members = target.p.sorted_members
    clauses: list[tuple[str, tuple[int, ...]]] = []
    for name, pr in fam.items():
        if pr.p.is_empty:
            continue
        for row in np.unique(stack_columns(pr.p.sorted_members, pr.arity, m), axis=0):
            clauses.append((name, tuple(k + int(c) for c in row)))
    for i in range(k):
        y = sum(((x >> i) & 1) << j for j, x in enumerate(members))
        clauses.append((EQUAL, (i, k + y)))
    g = Gadget(k, 1 << m, tuple(clauses))
    if k + (1 << m) <= MAX_GADGET_VARS:
        b1, b2 = check_ppp_bullets(g, fam, target)
        if not (b1 and b2):
            raise AssertionError("constructed gadget fails a definability condition")
    return g


@dataclass(frozen=True)
class FunFamily:
    functions: frozenset[BoolFun]
    r_max: int

    def __post_init__(self) -> None:
        funs = frozenset(self.functions)
        if any(f.arity > self.r_max for f in funs):
            raise ValueError(f"function arity exceeds r_max = {self.r_max}")
        object.__setattr__(self, "functions", funs)

    def slice(self, R: int) -> frozenset[BoolFun]:
        return frozenset(f for f in self.functions if f.arity == R)

    def __contains__(self, f: BoolFun) -> bool:
        return f in self.functions


@dataclass(frozen=True)
class ClosureReport:
    projection_closed: bool
    clone: bool
    witness: object = None


def _first_missing_projection(F: FunFamily, r_max: int):
    for f in sorted(F.functions, key=lambda g: (g.arity, g.table)):
        for R in range(1, r_max + 1):
            for pi in product(range(1, R + 1), repeat=f.arity):
                g = project(f, pi, R)
                if g not in F:
                    return (f, pi, g)
    return None


def family_closure_checks(F: FunFamily, r_max: int | None = None) -> ClosureReport:
    """Projection closure and clone closure of F, both checked up to arity r_max.

    Composition f(g_1, ..., g_L) with all g_i of arity R is checked by asking
    whether f preserves the arity-2^R relation formed by F's arity-R tables.
    """
    r_max = F.r_max if r_max is None else r_max
    missing = _first_missing_projection(F, r_max)
    if missing is not None:
        return ClosureReport(False, False, missing)
    for R in range(1, r_max + 1):
        for i in range(1, R + 1):
            d = dictator(R, i)
            if d not in F:
                return ClosureReport(True, False, d)
    for R in range(1, r_max + 1):
        tables = Relation(1 << R, frozenset(f.table for f in F.slice(R)))
        pr = PromiseRelation(tables, tables)
        for f in sorted(F.functions, key=lambda g: (g.arity, g.table)):
            stack = check_weak_polymorphism(f, pr)
            if stack is not None:
                return ClosureReport(True, False, (f, R, stack))
    return ClosureReport(True, True, None)


def construct_gamma_from_family(F: FunFamily, R: int) -> PromiseRelation:
    """(dictators of arity R, arity-R members of F), as relations of arity 2^R."""
    if dictator(1, 1) not in F:
        raise MissingIdentity("the family does not contain the identity")
    missing = _first_missing_projection(F, R)
    if missing is not None:
        raise NotProjectionClosed(f"projection {missing[2]!r} of {missing[0]!r} is missing", missing)
    k = 1 << R
    P = Relation(k, frozenset(dictator(R, i).table for i in range(1, R + 1)))
    Q = Relation(k, frozenset(f.table for f in F.slice(R)))
    return PromiseRelation(P, Q)
