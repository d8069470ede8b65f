"""Fixture families and instance corpora shared by the test modules."""

from __future__ import annotations

import random
from itertools import product

from pcsp.polymorphisms import FamilyKind
from pcsp.relations import (
    NOT,
    SET_ONE,
    SET_ZERO,
    Family,
    Instance,
    PromiseRelation,
    Relation,
    make_family,
)

H = PromiseRelation.ham
IMPLIES = PromiseRelation.csp(Relation.from_tuples(2, [(0, 0), (0, 1), (1, 1)]))

ZERO_FAM = make_family([H(3, {1}, {0, 1}), H(2, {0, 2}, {0, 2})])
ONE_FAM = ZERO_FAM.map(PromiseRelation.flip_all)
AND_FAM = make_family([IMPLIES, H(3, {1}, {0, 1}), SET_ONE], ["IMP", "R1", "SET-ONE"])
OR_FAM = make_family([IMPLIES, H(3, {2}, {2, 3}), SET_ZERO], ["IMP", "R1", "SET-ZERO"])
PAR_FAM = make_family([NOT, H(3, {1, 3}, {1, 3}), H(3, {1}, {1, 3})])
MAJ_FAM = make_family([H(3, {2, 3}, {1, 2, 3}), NOT])
HITTING = make_family([H(3, {1}, {1, 2}), H(3, {2}, {1, 2})], ["HIT1", "HIT2"])
AT_FAM = make_family([H(3, {1}, {1, 2}), H(3, {2}, {1, 2}), NOT], ["HIT1", "HIT2", "NOT"])
ANTI_PAR_FAM = make_family([H(5, {2}, {1, 2, 3, 5}), NOT])
ANTI_MAJ_FAM = make_family([H(5, {3}, {0, 1, 2, 3}), NOT])

# (name, family, kind the default solver should pick)
ENGINE_FIXTURES = [
    ("zero", ZERO_FAM, FamilyKind.ZERO),
    ("one", ONE_FAM, FamilyKind.ONE),
    ("and", AND_FAM, FamilyKind.AND),
    ("or", OR_FAM, FamilyKind.OR),
    ("par", PAR_FAM, FamilyKind.PAR),
    ("maj", MAJ_FAM, FamilyKind.MAJ),
    ("at", AT_FAM, FamilyKind.AT),
    ("hitting", HITTING, FamilyKind.AT),
    ("anti-par", ANTI_PAR_FAM, FamilyKind.ANTI_PAR),
    ("anti-maj", ANTI_MAJ_FAM, FamilyKind.ANTI_MAJ),
]

# Families whose kind is forced so the negation route runs for AT as well.
FORCED_FIXTURES = [
    ("anti-at on hitting", HITTING, FamilyKind.ANTI_AT),
    ("anti-at with NOT", AT_FAM, FamilyKind.ANTI_AT),
]

# Hard families and their tractable neighbours.
SAT_K1 = make_family([H(3, {1, 2, 3}, {1, 2, 3}), NOT])
SAT_K2 = make_family([H(5, {2, 3, 4, 5}, {1, 2, 3, 4, 5}), NOT])
SAT_K1_EASY = make_family([H(3, {2, 3}, {1, 2, 3}), NOT])
SAT_K2_EASY = make_family([H(5, {3, 4, 5}, {1, 2, 3, 4, 5}), NOT])
DISC_K1 = make_family([H(3, {1, 2}, {1, 2}), NOT])
DISC_K2 = make_family([H(5, {2, 3}, {1, 2, 3, 4}), NOT])
EVEN_BALANCED = make_family([H(2, {1}, {1}), H(4, {2}, {1, 2, 3}), NOT])
HARD_FIXTURES = [("2+eps-sat k=1", SAT_K1), ("2+eps-sat k=2", SAT_K2), ("discrepancy k=1", DISC_K1), ("discrepancy k=2", DISC_K2)]


def exhaustive_instances(fam: Family, n: int, m: int):
    """Every instance on exactly n variables with m clauses, clauses in nondecreasing order."""
    scopes = [(r, vs) for r, pr in enumerate(fam.relations) for vs in product(range(n), repeat=pr.arity)]

    def rec(start: int, left: int, acc: list):
        if left == 0:
            yield Instance(n, tuple(acc))
            return
        for i in range(start, len(scopes)):
            acc.append(scopes[i])
            yield from rec(i, left - 1, acc)
            acc.pop()

    yield from rec(0, m, [])


def random_instances(fam: Family, count: int, seed: int, n_max: int = 8, m_max: int = 5):
    """Seeded uniform instances plus instances planted on a P-side assignment."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        n = rng.randint(1, n_max)
        m = rng.randint(1, m_max)
        planted = [rng.randint(0, 1) for _ in range(n)] if i % 2 else None
        clauses = []
        for _ in range(m):
            for _ in range(50):
                r = rng.randrange(len(fam))
                pr = fam.relations[r]
                vs = tuple(rng.randrange(n) for _ in range(pr.arity))
                if planted is None or tuple(planted[v] for v in vs) in _tuples(pr.p):
                    clauses.append((r, vs))
                    break
        out.append(Instance(n, tuple(clauses)))
    return out


def _tuples(r: Relation) -> set:
    return set(r.tuples())
