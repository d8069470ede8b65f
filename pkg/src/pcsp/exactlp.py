"""Exact linear algebra: rational LP feasibility, F2 and integer linear systems, affine hulls."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

from .errors import EmptyRelation
from .relations import Relation, index_tuple, tuple_index

__all__ = [
    "Rational",
    "Sense",
    "Constraint",
    "LPProblem",
    "lp_feasible",
    "F2System",
    "gauss_f2",
    "Ring",
    "AffineHullF2",
    "AffineHullZ",
    "affine_hull",
    "solve_integer_system",
]

Rational = Fraction


class Sense(str, enum.Enum):
    LE = "<="
    EQ = "="
    GE = ">="


@dataclass(frozen=True)
class Constraint:
    """sum(coeff * x[var] for var, coeff in coeffs) <sense> rhs, stored sparsely."""

    coeffs: tuple[tuple[int, Fraction], ...]
    sense: Sense
    rhs: Fraction

    @classmethod
    def make(cls, row: Sequence | Mapping[int, object], sense: str | Sense, rhs) -> Constraint:
        items = row.items() if isinstance(row, Mapping) else enumerate(row)
        merged: dict[int, Fraction] = {}
        for j, c in items:
            c = Fraction(c)
            if c:
                merged[j] = merged.get(j, Fraction(0)) + c
        coeffs = tuple(sorted((j, c) for j, c in merged.items() if c))
        return cls(coeffs, Sense(sense), Fraction(rhs))

    def holds(self, point: Sequence[Fraction]) -> bool:
        lhs = sum((c * point[j] for j, c in self.coeffs), Fraction(0))
        if self.sense is Sense.LE:
            return lhs <= self.rhs
        if self.sense is Sense.GE:
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass(frozen=True)
class LPProblem:
    """Linear feasibility problem over non-negative rational variables."""

    num_vars: int
    constraints: tuple[Constraint, ...]
    pins: tuple[tuple[int, Fraction], ...] = ()

    def __post_init__(self) -> None:
        for con in self.constraints:
            for j, _ in con.coeffs:
                if not 0 <= j < self.num_vars:
                    raise ValueError(f"coefficient index {j} outside 0..{self.num_vars - 1}")
        for j, _ in self.pins:
            if not 0 <= j < self.num_vars:
                raise ValueError(f"pinned variable {j} out of range")

    def dense_row(self, i: int) -> list[Fraction]:
        row = [Fraction(0)] * self.num_vars
        for j, c in self.constraints[i].coeffs:
            row[j] = c
        return row

    def with_pins(self, pins: Mapping[int, object]) -> LPProblem:
        merged = dict(self.pins)
        merged.update({j: Fraction(v) for j, v in pins.items()})
        return LPProblem(self.num_vars, self.constraints, tuple(sorted(merged.items())))

    def all_constraints(self) -> list[Constraint]:
        pinned = [Constraint(((j, Fraction(1)),), Sense.EQ, v) for j, v in self.pins]
        return list(self.constraints) + pinned

    def satisfied_by(self, point: Sequence[Fraction]) -> bool:
        return all(x >= 0 for x in point) and all(c.holds(point) for c in self.all_constraints())


def lp_feasible(problem: LPProblem) -> tuple[Fraction, ...] | None:
    """A feasible point of the problem, or None if it is infeasible.

    Phase-one simplex on a sparse tableau with Bland's rule, so it terminates
    on degenerate inputs; all arithmetic is in exact fractions.
    """
    n = problem.num_vars
    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    basis: list[int] = []
    next_col = n
    artificial_rows: list[int] = []
    for con in problem.all_constraints():
        row = dict(con.coeffs)
        b = con.rhs
        sense = con.sense
        if b < 0:
            row = {j: -c for j, c in row.items()}
            b = -b
            sense = {Sense.LE: Sense.GE, Sense.GE: Sense.LE, Sense.EQ: Sense.EQ}[sense]
        if sense is Sense.LE:
            row[next_col] = Fraction(1)
            basis.append(next_col)
            next_col += 1
        else:
            if sense is Sense.GE:
                row[next_col] = Fraction(-1)
                next_col += 1
            artificial_rows.append(len(rows))
            basis.append(-1)  # placeholder, artificial columns are assigned below
        rows.append(row)
        rhs.append(b)

    first_artificial = next_col
    for i in artificial_rows:
        rows[i][next_col] = Fraction(1)
        basis[i] = next_col
        next_col += 1

    # phase-one objective: w = w0 - sum(d_j x_j) over non-basic columns
    d: dict[int, Fraction] = {}
    w0 = Fraction(0)
    for i in artificial_rows:
        w0 += rhs[i]
        for j, c in rows[i].items():
            if j < first_artificial:
                d[j] = d.get(j, Fraction(0)) + c
    d = {j: c for j, c in d.items() if c}

    while True:
        entering = min((j for j, c in d.items() if c > 0 and j < first_artificial), default=None)
        if entering is None:
            break
        leave = None
        best = None
        for i, row in enumerate(rows):
            a = row.get(entering)
            if a is not None and a > 0:
                ratio = rhs[i] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            # unbounded direction; cannot happen for the phase-one objective
            raise AssertionError("phase-one objective unbounded")
        _pivot(rows, rhs, leave, entering)
        basis[leave] = entering
        factor = d.get(entering)
        if factor:
            for j, c in rows[leave].items():
                v = d.get(j, Fraction(0)) - factor * c
                if v:
                    d[j] = v
                else:
                    d.pop(j, None)
            w0 -= factor * rhs[leave]

    if w0 > 0:
        return None
    point = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            point[j] = rhs[i]
    return tuple(point)


def _pivot(rows: list[dict[int, Fraction]], rhs: list[Fraction], r: int, col: int) -> None:
    prow = rows[r]
    a = prow[col]
    if a != 1:
        for j in prow:
            prow[j] = prow[j] / a
        rhs[r] = rhs[r] / a
    for i, row in enumerate(rows):
        if i == r:
            continue
        factor = row.get(col)
        if not factor:
            continue
        for j, c in prow.items():
            v = row.get(j, Fraction(0)) - factor * c
            if v:
                row[j] = v
            else:
                row.pop(j, None)
        rhs[i] -= factor * rhs[r]


@dataclass(frozen=True)
class F2System:
    """Equations XOR(x_j for j in support) = parity."""

    num_vars: int
    equations: tuple[tuple[frozenset[int], int], ...]

    def __post_init__(self) -> None:
        eqs = tuple((frozenset(s), int(p) & 1) for s, p in self.equations)
        for s, _ in eqs:
            if any(not 0 <= j < self.num_vars for j in s):
                raise ValueError("equation support outside the variable range")
        object.__setattr__(self, "equations", eqs)

    def satisfied_by(self, bits: Sequence[int]) -> bool:
        return all(sum(bits[j] for j in s) % 2 == p for s, p in self.equations)


def gauss_f2(system: F2System) -> tuple[int, ...] | None:
    """One solution (free variables 0), or None when elimination derives 0 = 1."""
    n = system.num_vars
    parity_bit = 1 << n
    var_mask = parity_bit - 1
    pivots: dict[int, int] = {}
    for support, parity in system.equations:
        row = sum(1 << j for j in support) | (parity_bit if parity else 0)
        while row & var_mask:
            low = (row & -row).bit_length() - 1
            if low in pivots:
                row ^= pivots[low]
            else:
                pivots[low] = row
                break
        else:
            if row & parity_bit:
                return None
    bits = [0] * n
    for b in sorted(pivots, reverse=True):
        row = pivots[b]
        v = 1 if row & parity_bit else 0
        rest = row & var_mask & ~(1 << b)
        while rest:
            low = (rest & -rest).bit_length() - 1
            v ^= bits[low]
            rest &= rest - 1
        bits[b] = v
    return tuple(bits)


class Ring(str, enum.Enum):
    F2 = "f2"
    INTEGERS = "integers"


@dataclass(frozen=True)
class AffineHullF2:
    """offset + span(basis) over F2; the basis is in reduced row echelon form."""

    arity: int
    offset: tuple[int, ...]
    basis: tuple[tuple[int, ...], ...]

    def points(self) -> Relation:
        off = tuple_index(self.offset)
        span = {0}
        for b in self.basis:
            v = tuple_index(b)
            span |= {s ^ v for s in span}
        return Relation(self.arity, frozenset(off ^ s for s in span))

    def equations(self) -> list[tuple[frozenset[int], int]]:
        """Parity checks (support over coordinates 0..k-1, parity) cutting out the hull."""
        pivots = {}
        for b in self.basis:
            p = b.index(1)
            pivots[p] = b
        eqs = []
        for f in range(self.arity):
            if f in pivots:
                continue
            support = {f} | {p for p, b in pivots.items() if b[f]}
            parity = sum(self.offset[j] for j in support) % 2
            eqs.append((frozenset(support), parity))
        return eqs


@dataclass(frozen=True)
class AffineHullZ:
    """Integer equations sum(a_j x_j) = c whose rational solution set is the affine hull."""

    arity: int
    equations: tuple[tuple[tuple[int, ...], int], ...]

    def contains(self, x: Sequence[int]) -> bool:
        return all(sum(a * v for a, v in zip(coef, x)) == c for coef, c in self.equations)


def affine_hull(r: Relation, ring: Ring | str = Ring.F2) -> AffineHullF2 | AffineHullZ:
    if r.is_empty:
        raise EmptyRelation("affine hull of an empty relation")
    ring = Ring(ring)
    k = r.arity
    if ring is Ring.F2:
        tuples = r.tuples()
        offset = min(tuples)
        off = tuple_index(offset)
        rows = _rref_f2([m ^ off for m in r.members], k)
        return AffineHullF2(k, offset, tuple(index_tuple(v, k) for v in rows))

    matrix = [[Fraction(b) for b in t] + [Fraction(1)] for t in r.tuples()]
    null = _nullspace(matrix, k + 1)
    equations = []
    for vec in null:
        ints = _primitive(vec)
        equations.append((tuple(ints[:k]), -ints[k]))
    return AffineHullZ(k, tuple(equations))


def _rref_f2(vectors: Iterable[int], k: int) -> list[int]:
    """Reduced row echelon basis of the span, pivot = lowest set bit, sorted by pivot."""
    pivots: dict[int, int] = {}
    for v in vectors:
        for p in sorted(pivots):
            if (v >> p) & 1:
                v ^= pivots[p]
        if v:
            low = (v & -v).bit_length() - 1
            for p in pivots:
                if (pivots[p] >> low) & 1:
                    pivots[p] ^= v
            pivots[low] = v
    return [pivots[p] for p in sorted(pivots)]


def _nullspace(matrix: list[list[Fraction]], ncols: int) -> list[list[Fraction]]:
    rows = [row[:] for row in matrix]
    pivot_cols = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        a = rows[r][c]
        rows[r] = [x / a for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivot_cols.append(c)
        r += 1
    basis = []
    for free in range(ncols):
        if free in pivot_cols:
            continue
        vec = [Fraction(0)] * ncols
        vec[free] = Fraction(1)
        for i, pc in enumerate(pivot_cols):
            vec[pc] = -rows[i][free]
        basis.append(vec)
    return basis


def _primitive(vec: Sequence[Fraction]) -> list[int]:
    den = 1
    for x in vec:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, x)
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x)
    return ints if lead > 0 else [-x for x in ints]


def solve_integer_system(
    rows: Sequence[Sequence[int]], rhs: Sequence[int], num_vars: int
) -> tuple[int, ...] | None:
    """An integer solution of rows . x = rhs, or None if none exists.

    Unimodular column operations bring the matrix to column echelon form
    H = A U; H y = b is solved by forward substitution with divisibility
    checks and x = U y.
    """
    A = [list(map(int, row)) for row in rows]
    b = list(map(int, rhs))
    n = num_vars
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop(c1: int, c2: int, s: int, t: int, u: int, v: int) -> None:
        # (col c1, col c2) <- (s*c1 + t*c2, u*c1 + v*c2)
        for M in (A, U):
            for row in M:
                x, y = row[c1], row[c2]
                row[c1], row[c2] = s * x + t * y, u * x + v * y

    pivot_of_row: list[int | None] = []
    col = 0
    for i in range(len(A)):
        if col >= n:
            pivot_of_row.append(None)
            continue
        for j in range(col + 1, n):
            a, c = A[i][col], A[i][j]
            if c == 0:
                continue
            if a == 0:
                colop(col, j, 0, 1, 1, 0)
                continue
            g, s, t = _ext_gcd(a, c)
            colop(col, j, s, t, -c // g, a // g)
        if A[i][col] == 0:
            pivot_of_row.append(None)
        else:
            pivot_of_row.append(col)
            col += 1

    y = [0] * n
    for i, row in enumerate(A):
        p = pivot_of_row[i]
        upto = p if p is not None else col
        s = b[i] - sum(row[j] * y[j] for j in range(upto))
        if p is None:
            if s != 0:
                return None
            continue
        if s % row[p] != 0:
            return None
        y[p] = s // row[p]
    return tuple(sum(U[r][c] * y[c] for c in range(n)) for r in range(n))


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with s*a + t*b = g = gcd(a, b) > 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t
