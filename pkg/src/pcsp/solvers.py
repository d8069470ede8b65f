"""Polynomial-time decision procedures for tractable families, and witness construction."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from .errors import NotPromise, NotTractable, NotYes, PromiseViolation, UnsupportedNonSymmetric
from .exactlp import (
    AffineHullF2,
    AffineHullZ,
    Constraint,
    F2System,
    LPProblem,
    Ring,
    Sense,
    affine_hull,
    gauss_f2,
    lp_feasible,
    solve_integer_system,
)
from .polymorphisms import FamilyKind, closure_join, closure_meet, has_family
from .relations import Family, Instance, PromiseRelation, Relation, Side, evaluate, negate

__all__ = [
    "Verdict",
    "PROBE_ORDER",
    "tractable_kind",
    "solve",
    "solve_constant",
    "solve_min_closed",
    "solve_affine",
    "build_hull_lp",
    "solve_lp_decision",
    "solve_at_affine",
    "construct_solution",
    "negate_q_transform",
    "horn_clauses",
]


@dataclass(frozen=True)
class Verdict:
    answer: str  # "yes" or "no"
    engine: str
    witness: tuple[int, ...] | None = None

    @property
    def yes(self) -> bool:
        return self.answer == "yes"


def _yes(engine: str, witness=None) -> Verdict:
    return Verdict("yes", engine, None if witness is None else tuple(witness))


def _no(engine: str) -> Verdict:
    return Verdict("no", engine)


PROBE_ORDER = (
    FamilyKind.ZERO,
    FamilyKind.ONE,
    FamilyKind.PAR,
    FamilyKind.AND,
    FamilyKind.OR,
    FamilyKind.MAJ,
    FamilyKind.AT,
    FamilyKind.ANTI_PAR,
    FamilyKind.ANTI_AND,
    FamilyKind.ANTI_OR,
    FamilyKind.ANTI_MAJ,
    FamilyKind.ANTI_AT,
)


def tractable_kind(fam: Family) -> FamilyKind:
    """First kind in probe order that the family admits."""
    for kind in PROBE_ORDER:
        try:
            if has_family(fam, kind):
                return kind
        except UnsupportedNonSymmetric:
            continue
    raise NotTractable("no implemented polymorphism family applies")


def _uses_empty_p(fam: Family, inst: Instance) -> bool:
    return any(fam.relations[r].p.is_empty for r, _ in inst.clauses)


def _checked(fam: Family, inst: Instance, engine: str, witness) -> Verdict:
    if not evaluate(fam, inst, witness, Side.Q):
        raise AssertionError(f"{engine} produced an assignment violating the q-side")
    return _yes(engine, witness)


def solve(
    fam: Family,
    inst: Instance,
    kind: FamilyKind | None = None,
    witness: bool = False,
    engine: str | None = None,
) -> Verdict:
    """Decide the promise problem with the solver matching the family's polymorphisms.

    ``engine="at-affine"`` selects the integer affine-hull route for AT
    families; by default AT and Maj use the LP route.
    """
    inst.check(fam)
    kind = tractable_kind(fam) if kind is None else FamilyKind(kind)
    if kind.is_anti:
        fam2, inst2 = negate_q_transform(fam, inst)
        v = solve(fam2, inst2, kind.base, witness, engine)
        w = None if v.witness is None else tuple(1 - b for b in v.witness)
        if w is not None:
            return _checked(fam, inst, "negate-q+" + v.engine, w)
        return Verdict(v.answer, "negate-q+" + v.engine)
    if kind is FamilyKind.ZERO:
        return solve_constant(fam, inst, 0)
    if kind is FamilyKind.ONE:
        return solve_constant(fam, inst, 1)
    if kind is FamilyKind.AND:
        return solve_min_closed(fam, inst, "meet")
    if kind is FamilyKind.OR:
        return solve_min_closed(fam, inst, "join")
    if kind is FamilyKind.PAR:
        return solve_affine(fam, inst)
    if kind is FamilyKind.AT and engine == "at-affine":
        return solve_at_affine(fam, inst)
    verdict = solve_lp_decision(fam, inst)
    if witness and verdict.yes:
        w = construct_solution(fam, inst, kind)
        if w is not None:
            return _yes(verdict.engine, w)
    return verdict


def solve_constant(fam: Family, inst: Instance, bit: int) -> Verdict:
    engine = f"constant-{bit}"
    if _uses_empty_p(fam, inst):
        return _no(engine)
    a = (bit,) * inst.num_vars
    if evaluate(fam, inst, a, Side.Q):
        return _yes(engine, a)
    return _no(engine)


@lru_cache(maxsize=None)
def horn_clauses(r: Relation) -> tuple[tuple[frozenset[int], int | None], ...]:
    """Every Horn clause (body -> head, head None for a goal) over positions 0..k-1 that holds on r.

    For a meet-closed r the conjunction of these clauses defines r exactly;
    this is checked before returning.
    """
    k = r.arity
    kept = []
    positions = range(k)
    for head in [None, *positions]:
        rest = [p for p in positions if p != head]
        for size in range(len(rest) + 1):
            for body in combinations(rest, size):
                bmask = sum(1 << p for p in body)
                if all((t & bmask) != bmask or (head is not None and (t >> head) & 1) for t in r.members):
                    kept.append((frozenset(body), head))
    # drop clauses implied by a kept clause with a smaller body and the same head
    minimal = [
        (body, head)
        for body, head in kept
        if not any(h2 == head and b2 < body for b2, h2 in kept)
    ]
    models = {
        x
        for x in range(1 << k)
        if all(not all((x >> p) & 1 for p in body) or (head is not None and (x >> head) & 1) for body, head in minimal)
    }
    if models != set(r.members):
        raise ValueError(f"{r!r} is not closed under coordinatewise AND")
    return tuple(minimal)


def _horn_minimal_model(n: int, clauses: list[tuple[frozenset[int], int | None]]) -> list[int] | None:
    """Least model by unit propagation, or None if a goal clause fires."""
    count = [len(body) for body, _ in clauses]
    occurs: list[list[int]] = [[] for _ in range(n)]
    for ci, (body, _) in enumerate(clauses):
        for v in body:
            occurs[v].append(ci)
    value = [0] * n
    queue: list[int] = []
    for ci, (body, head) in enumerate(clauses):
        if not body:
            if head is None:
                return None
            if not value[head]:
                value[head] = 1
                queue.append(head)
    while queue:
        v = queue.pop()
        for ci in occurs[v]:
            count[ci] -= 1
            if count[ci] == 0:
                head = clauses[ci][1]
                if head is None:
                    return None
                if not value[head]:
                    value[head] = 1
                    queue.append(head)
    return value


def solve_min_closed(fam: Family, inst: Instance, mode: str = "meet") -> Verdict:
    """Solve the CSP over the meet (or join) closures of the p-sides via Horn propagation."""
    if mode not in ("meet", "join"):
        raise ValueError(f"mode must be 'meet' or 'join', got {mode!r}")
    engine = f"horn-{mode}"
    if _uses_empty_p(fam, inst):
        return _no(engine)
    closure = closure_meet if mode == "meet" else closure_join
    compiled = {}
    clauses: list[tuple[frozenset[int], int | None]] = []
    for r, vs in inst.clauses:
        if r not in compiled:
            rel = closure(fam.relations[r].p)
            # the join case runs on complemented bits, where the closure is meet-closed
            compiled[r] = horn_clauses(rel if mode == "meet" else negate(rel))
        for body, head in compiled[r]:
            bvars = frozenset(vs[p] for p in body)
            hvar = None if head is None else vs[head]
            if hvar is not None and hvar in bvars:
                continue
            clauses.append((bvars, hvar))
    model = _horn_minimal_model(inst.num_vars, clauses)
    if model is None:
        return _no(engine)
    if mode == "join":
        model = [1 - b for b in model]
    return _checked(fam, inst, engine, model)


def solve_affine(fam: Family, inst: Instance) -> Verdict:
    """Gaussian elimination over the F2 affine hulls of the p-sides."""
    engine = "affine-f2"
    if _uses_empty_p(fam, inst):
        return _no(engine)
    hulls: dict[int, list] = {}
    equations = []
    for r, vs in inst.clauses:
        if r not in hulls:
            hull = affine_hull(fam.relations[r].p, Ring.F2)
            assert isinstance(hull, AffineHullF2)
            hulls[r] = hull.equations()
        for support, parity in hulls[r]:
            mask = set()
            for pos in support:
                mask ^= {vs[pos]}
            equations.append((frozenset(mask), parity))
    sol = gauss_f2(F2System(inst.num_vars, tuple(equations)))
    if sol is None:
        return _no(engine)
    return _checked(fam, inst, engine, sol)


def build_hull_lp(fam: Family, inst: Instance) -> LPProblem:
    """Variables v_0..v_{n-1} in [0,1], then one convex weight per (clause, p-member).

    Each clause constrains (v_{x_1}, ..., v_{x_k}) to the convex hull of p;
    a repeated variable simply appears in several coordinate equations.
    """
    n = inst.num_vars
    cons = [Constraint(((j, Fraction(1)),), Sense.LE, Fraction(1)) for j in range(n)]
    col = n
    for r, vs in inst.clauses:
        members = fam.relations[r].p.sorted_members
        alphas = list(range(col, col + len(members)))
        col += len(members)
        cons.append(Constraint(tuple((a, Fraction(1)) for a in alphas), Sense.EQ, Fraction(1)))
        for pos, v in enumerate(vs):
            row = {a: Fraction(1) for a, t in zip(alphas, members) if (t >> pos) & 1}
            row[v] = row.get(v, Fraction(0)) - 1
            cons.append(Constraint.make(row, Sense.EQ, 0))
    return LPProblem(col, tuple(cons))


@dataclass(frozen=True)
class _Probe:
    feasible: bool
    base: tuple[Fraction, ...] | None
    columns: tuple[tuple[Fraction, ...], ...] | None
    failed_var: int | None = None


def _lp_probe(fam: Family, inst: Instance) -> _Probe:
    """Run the pin-0-then-pin-1 loop; keep one integral-on-j solution per variable.

    A feasible point found along the way already certifies every pin it
    satisfies, so those pins are not re-solved.  This changes no answer.
    """
    n = inst.num_vars
    if _uses_empty_p(fam, inst):
        return _Probe(False, None, None)
    lp = build_hull_lp(fam, inst)
    base = lp_feasible(lp)
    if base is None:
        return _Probe(False, None, None)
    known: dict[tuple[int, int], tuple[Fraction, ...]] = {}

    def record(pt: tuple[Fraction, ...]) -> None:
        for j in range(n):
            if pt[j] in (0, 1):
                known.setdefault((j, int(pt[j])), pt)

    record(base)
    columns = []
    for j in range(n):
        pt = None
        for val in (0, 1):
            pt = known.get((j, val))
            if pt is None:
                pt = lp_feasible(lp.with_pins({j: val}))
                if pt is not None:
                    record(pt)
            if pt is not None:
                break
        if pt is None:
            return _Probe(False, base, None, j)
        columns.append(pt)
    return _Probe(True, base, tuple(columns))


def solve_lp_decision(fam: Family, inst: Instance) -> Verdict:
    inst.check(fam)
    return _yes("lp") if _lp_probe(fam, inst).feasible else _no("lp")


def solve_at_affine(fam: Family, inst: Instance) -> Verdict:
    """Integer solution of the affine hulls of the p-sides, rounded to {0,1}."""
    engine = "at-affine"
    inst.check(fam)
    if _uses_empty_p(fam, inst):
        return _no(engine)
    n = inst.num_vars
    hulls: dict[int, AffineHullZ] = {}
    rows, rhs = [], []
    for r, vs in inst.clauses:
        if r not in hulls:
            hull = affine_hull(fam.relations[r].p, Ring.INTEGERS)
            assert isinstance(hull, AffineHullZ)
            hulls[r] = hull
        for coeffs, c in hulls[r].equations:
            row = [0] * n
            for pos, a in enumerate(coeffs):
                row[vs[pos]] += a
            rows.append(row)
            rhs.append(c)
    w = solve_integer_system(rows, rhs, n)
    if w is None:
        return _no(engine)
    x = [1 if v >= 1 else 0 for v in w]
    if evaluate(fam, inst, x, Side.Q):
        return _yes(engine, x)
    return _yes(engine)


def _combine(columns: Sequence[Sequence[Fraction]], weights: Sequence[Fraction], n: int) -> list[Fraction]:
    return [sum((w * col[i] for w, col in zip(weights, columns)), Fraction(0)) for i in range(n)]


def _perturb(
    columns: Sequence[Sequence[Fraction]],
    n: int,
    target: Sequence[Fraction],
    must_differ: Sequence[bool],
) -> list[Fraction]:
    """Convex weights w such that (M w)_i != target_i wherever must_differ[i].

    Each round picks the lowest offending i and moves weight eps/2 onto
    column i, whose i-th entry is integral, with eps = (smallest nonzero gap)/n
    so no coordinate that already differs can reach its target.
    """
    weights = [Fraction(1, n)] * n
    while True:
        y = _combine(columns, weights, n)
        bad = [i for i in range(n) if must_differ[i] and y[i] == target[i]]
        if not bad:
            return y
        j = bad[0]
        gaps = [abs(y[i] - target[i]) for i in range(n) if y[i] != target[i]]
        eps = min(gaps) / n if gaps else Fraction(1)
        weights = [(1 - eps / 2) * w for w in weights]
        weights[j] += eps / 2


def construct_solution(fam: Family, inst: Instance, kind: FamilyKind) -> tuple[int, ...] | None:
    """Q-side assignment built from the pinned LP solutions; None only if verification fails."""
    kind = FamilyKind(kind)
    inst.check(fam)
    probe = _lp_probe(fam, inst)
    if not probe.feasible:
        raise NotYes("the LP decision procedure answered NO")
    n = inst.num_vars
    if n == 0:
        x: list[int] = []
    elif kind is FamilyKind.MAJ:
        half = Fraction(1, 2)
        y = _perturb(probe.columns, n, [half] * n, [True] * n)
        x = [1 if v > half else 0 for v in y]
    elif kind is FamilyKind.AT:
        ref = probe.base[:n]
        y = _perturb(probe.columns, n, ref, [v not in (0, 1) for v in ref])
        x = []
        for v, r in zip(y, ref):
            if v < r or (v == r and r == 0):
                x.append(0)
            else:
                x.append(1)
    else:
        raise ValueError(f"solution construction is defined for maj and at, not {kind.value}")
    if evaluate(fam, inst, x, Side.Q):
        return tuple(x)
    return None


def negate_q_transform(fam: Family, inst: Instance) -> tuple[Family, Instance]:
    """Replace every (P, Q) by (P, not Q); the instance is reused unchanged."""
    try:
        fam2 = fam.map(lambda pr: PromiseRelation(pr.p, negate(pr.q)))
    except PromiseViolation as exc:
        raise NotPromise(str(exc)) from None
    return fam2, inst
