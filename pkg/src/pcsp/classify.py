"""Tractability classification of symmetric Boolean promise families and its hardness tooling."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import FamilyPresent, HypothesisViolated, NonSymmetric, NotHard, OutOfScope, TooLarge
from .polymorphisms import (
    BoolFun,
    FamilyKind,
    closure_symmetric,
    default_enum_arity,
    enumerate_weak_polymorphisms,
    fixing_set,
    has_family,
)
from .relations import Family, PromiseRelation, SymmetricProfile

__all__ = [
    "Classification",
    "FOLDED_ORDER",
    "UNFOLDED_ORDER",
    "classify",
    "classify_explicit",
    "shrink_top",
    "shift_down",
    "CanonicalForm",
    "canonical_excluding",
    "ScanReport",
    "c_fixing_scan",
]

FOLDED_ORDER = (
    FamilyKind.PAR,
    FamilyKind.MAJ,
    FamilyKind.AT,
    FamilyKind.ANTI_PAR,
    FamilyKind.ANTI_MAJ,
    FamilyKind.ANTI_AT,
)
UNFOLDED_ORDER = (
    FamilyKind.ZERO,
    FamilyKind.ONE,
    FamilyKind.AND,
    FamilyKind.OR,
    FamilyKind.ANTI_AND,
    FamilyKind.ANTI_OR,
)


@dataclass(frozen=True)
class Classification:
    verdict: str  # "tractable", "np-hard" or "out-of-scope"
    kind: FamilyKind | None = None
    reason: str | None = None
    trace: tuple[str, ...] = ()

    @property
    def tractable(self) -> bool:
        return self.verdict == "tractable"

    @property
    def hard(self) -> bool:
        return self.verdict == "np-hard"


def classify(fam: Family, assume_folded: bool = False) -> Classification:
    """Tractable(kind) for the first admitted kind, else NP-hard; out-of-scope if undecidable here.

    Families that are not known to be folded are probed for the constant and
    AND/OR kinds first; if none applies the result is out-of-scope, since the
    hardness side of the dichotomy needs foldedness.
    """
    trace: list[str] = []
    if not fam.symmetric:
        bad = [name for name, pr in fam.items() if not pr.is_symmetric]
        return Classification("out-of-scope", reason=f"non-symmetric relations: {bad}")
    folded = assume_folded or fam.contains_not
    trace.append("folded: " + ("NOT present" if fam.contains_not else "assumed") if folded else "folded: unknown")
    order = FOLDED_ORDER if folded else UNFOLDED_ORDER + FOLDED_ORDER
    for kind in order:
        ok = has_family(fam, kind)
        trace.append(f"probe {kind.value}: {'yes' if ok else 'no'}")
        if ok:
            return Classification("tractable", kind, trace=tuple(trace))
    if not folded:
        return Classification(
            "out-of-scope",
            reason="no tractable kind found and foldedness not established",
            trace=tuple(trace),
        )
    return Classification("np-hard", trace=tuple(trace))


def classify_explicit(k: int, S: Iterable[int], T: Iterable[int]) -> Classification:
    """Closed-form test on weight sets for the family {(Ham_k(S), Ham_k(T)), NOT, SET-ZERO, SET-ONE}."""
    S, T = frozenset(S), frozenset(T)
    if not S <= T <= frozenset(range(k + 1)):
        raise ValueError(f"need S <= T <= 0..{k}")
    if not S & frozenset(range(1, k)):
        raise HypothesisViolated("S has no weight strictly between 0 and k")
    odd = frozenset(w for w in range(1, k + 1) if w % 2 == 1)
    even = frozenset(w for w in range(0, k + 1) if w % 2 == 0)
    if S <= odd <= T:
        return Classification("tractable", FamilyKind.PAR, trace=("odd weights",))
    if S <= even <= T:
        return Classification("tractable", FamilyKind.PAR, trace=("even weights",))
    window = frozenset(w for w in range(k + 1) if 2 * min(S) - k + 1 <= w <= 2 * max(S) - 1)
    if window <= T:
        return Classification("tractable", FamilyKind.MAJ, trace=("majority window",))
    if len(S) == 1 and frozenset(range(1, k)) <= T:
        return Classification("tractable", FamilyKind.AT, trace=("single weight, interior covered",))
    return Classification("np-hard")


def _profiles(pr: PromiseRelation) -> tuple[SymmetricProfile, SymmetricProfile]:
    prof = pr.profiles()
    if prof is None:
        raise NonSymmetric(f"{pr!r} is not symmetric")
    return prof


def shrink_top(pr: PromiseRelation) -> PromiseRelation:
    """Drop weight k from both sides and lower the arity by one."""
    sp, sq = _profiles(pr)
    k = pr.arity
    if k < 2:
        raise ValueError("shrink_top needs arity at least 2")
    return PromiseRelation.ham(k - 1, sp.weights - {k}, sq.weights - {k})


def shift_down(pr: PromiseRelation) -> PromiseRelation:
    """Lower every weight and the arity by one, discarding weight -1."""
    sp, sq = _profiles(pr)
    k = pr.arity
    if k < 2:
        raise ValueError("shift_down needs arity at least 2")
    return PromiseRelation.ham(k - 1, {w - 1 for w in sp.weights if w >= 1}, {w - 1 for w in sq.weights if w >= 1})


@dataclass(frozen=True)
class CanonicalForm:
    relation: PromiseRelation
    shape: str
    trace: tuple[str, ...] = field(default=())


class _Tracer:
    def __init__(self, pr: PromiseRelation, note: str):
        self.pr = pr
        self.steps = [f"{note}: {pr!r}"]

    def set(self, pr: PromiseRelation, note: str) -> None:
        self.pr = pr
        self.steps.append(f"{note}: {pr!r}")

    def flip(self) -> None:
        self.set(self.pr.flip_all(), "flip all coordinates")

    def shrink(self, times: int) -> None:
        for _ in range(times):
            self.set(shrink_top(self.pr), "shrink_top")

    def shift(self, times: int) -> None:
        for _ in range(times):
            self.set(shift_down(self.pr), "shift_down")


def _check_canonical_pre(fam: Family, kind: FamilyKind) -> None:
    if kind not in (FamilyKind.AT, FamilyKind.MAJ):
        raise ValueError(f"canonical forms exist for at and maj, not {kind.value}")
    if not fam.symmetric:
        raise OutOfScope("family is not symmetric")
    if not (fam.contains_not and fam.contains_set_zero and fam.contains_set_one):
        raise OutOfScope("family must contain NOT, SET-ZERO and SET-ONE")
    if has_family(fam, kind):
        raise FamilyPresent(f"{kind.value} is a polymorphism family of the input")


def canonical_excluding(fam: Family, kind: FamilyKind) -> CanonicalForm:
    """A relaxation of fam in canonical shape that still excludes the given kind."""
    kind = FamilyKind(kind)
    _check_canonical_pre(fam, kind)
    for name, pr in fam.items():
        sp, sq = _profiles(pr)
        if sp.weights:
            closure = closure_symmetric(kind, sp).weights
            missing = sorted(closure - sq.weights)
            if missing:
                if kind is FamilyKind.AT:
                    return _at_case(name, pr, missing[0])
                return _maj_case(name, pr, missing[0])
    raise AssertionError("no relation excludes the kind although has_family is false")


def _at_case(name: str, pr: PromiseRelation, a: int) -> CanonicalForm:
    k = pr.arity
    S = _profiles(pr)[0].weights
    interior = sorted(w for w in S if 0 < w < k)
    tr = _Tracer(pr, f"start from {name}, weight {a} in the AT closure but not in q")
    if 0 < a < k:
        ell = interior[0]
        tr.set(PromiseRelation.ham(k, {ell}, set(range(k + 1)) - {a}), f"relax to single weight {ell}, q without {a}")
        tr.shrink(k - (max(ell, a) + 1))
        tr.shift(min(ell, a) - 1)
        if ell > a:
            tr.flip()
        kk = tr.pr.arity
        return CanonicalForm(tr.pr, f"(Ham_{kk}({{1}}), Ham_{kk}(0..{kk - 2}, {kk}))", tuple(tr.steps))
    if a == k:
        tr.flip()
        S = _profiles(tr.pr)[0].weights
    l1, l2 = min(S), max(S)
    tr.set(PromiseRelation.ham(k, {l1, l2}, set(range(1, k + 1))), f"relax to weights {{{l1}, {l2}}}, q without 0")
    tr.shrink(k - l2)
    tr.flip()
    kk = tr.pr.arity
    b = kk - l1
    return CanonicalForm(tr.pr, f"(Ham_{kk}({{0, {b}}}), Ham_{kk}(0..{kk - 1}))", tuple(tr.steps))


def _maj_case(name: str, pr: PromiseRelation, b: int) -> CanonicalForm:
    k = pr.arity
    tr = _Tracer(pr, f"start from {name}, weight {b} in the majority closure but not in q")
    S = _profiles(pr)[0].weights
    below = [w for w in S if 0 < w < k and w < b]
    if not below:
        tr.flip()
        b = k - b
        S = _profiles(tr.pr)[0].weights
        below = [w for w in S if 0 < w < k and w < b]
    ell = min(below)
    top = max(S)
    if b > top:
        tr.set(PromiseRelation.ham(k, {top}, set(range(k + 1)) - {b}), f"relax to single weight {top}, q without {b}")
        tr.shrink(k - b)
        k2 = 2 * (b - top) + 1
        tr.shift(b - k2)
        kk = tr.pr.arity
        return CanonicalForm(tr.pr, f"(Ham_{kk}({{{(kk + 1) // 2}}}), Ham_{kk}(0..{kk - 1}))", tuple(tr.steps))
    tr.set(PromiseRelation.ham(k, {ell, top}, set(range(k + 1)) - {b}), f"relax to weights {{{ell}, {top}}}, q without {b}")
    tr.shrink(k - top)
    tr.shift(ell - 1)
    kk = tr.pr.arity
    missing = sorted(set(range(kk + 1)) - _profiles(tr.pr)[1].weights)
    return CanonicalForm(tr.pr, f"(Ham_{kk}({{1, {kk}}}), Ham_{kk}(0..{kk} without {missing[0]}))", tuple(tr.steps))


@dataclass(frozen=True)
class ScanReport:
    """Largest smallest-fixing-set size over the enumerated folded weak polymorphisms."""

    C: int
    counts: dict[int, int]
    worst: BoolFun | None
    worst_set: frozenset[int] | None


def c_fixing_scan(fam: Family, L_max: int, max_arity: int | None = None) -> ScanReport:
    cls = classify(fam)
    if not cls.hard:
        raise NotHard(f"family classifies as {cls.verdict}")
    cap = default_enum_arity() if max_arity is None else max_arity
    if L_max > cap:
        raise TooLarge(f"L_max {L_max} exceeds the enumeration cap {cap}")
    C = 0
    worst = worst_set = None
    counts = {}
    for L in range(1, L_max + 1):
        funs = enumerate_weak_polymorphisms(fam, L, folded_only=True, max_arity=cap)
        counts[L] = len(funs)
        for f in funs:
            S = fixing_set(f, L)
            if S is None:
                raise AssertionError(f"{f!r} has no fixing set at all")
            if worst is None or len(S) > C:
                C, worst, worst_set = len(S), f, S
    return ScanReport(C, counts, worst, worst_set)
