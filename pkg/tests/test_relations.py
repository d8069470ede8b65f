from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcsp import relations as rel_mod
from pcsp.errors import ArityMismatch, LengthMismatch, PromiseViolation, SchemaError, TooLarge, WeightOutOfRange
from pcsp.relations import (
    NOT,
    SET_ONE,
    SET_ZERO,
    Instance,
    PromiseRelation,
    Relation,
    Side,
    Status,
    brute_force_status,
    evaluate,
    find_satisfying,
    flip,
    index_tuple,
    make_family,
    make_ham,
    make_instance,
    negate,
    symmetric_profile,
    tuple_index,
)


def relations(max_arity: int = 4):
    return st.integers(1, max_arity).flatmap(
        lambda k: st.frozensets(st.integers(0, (1 << k) - 1)).map(lambda m: Relation(k, m))
    )


def test_tuple_index_low_bit_is_first_coordinate():
    assert tuple_index((1, 0, 0)) == 1
    assert tuple_index((0, 0, 1)) == 4
    assert index_tuple(6, 3) == (0, 1, 1)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=12))
def test_tuple_index_round_trip(bits):
    assert index_tuple(tuple_index(bits), len(bits)) == tuple(bits)


def test_make_ham_members():
    assert make_ham(3, {1}).tuples() == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    assert len(make_ham(4, {2})) == 6
    assert make_ham(2, set()).is_empty


def test_make_ham_errors():
    with pytest.raises(WeightOutOfRange):
        make_ham(3, {4})
    with pytest.raises(ArityMismatch):
        make_ham(0, {0})
    with pytest.raises(TooLarge):
        make_ham(17, {0})


@given(st.integers(1, 6).flatmap(lambda k: st.tuples(st.just(k), st.frozensets(st.integers(0, k)))))
def test_symmetric_profile_inverts_make_ham(arg):
    k, S = arg
    assert symmetric_profile(make_ham(k, S)).weights == S


def test_symmetric_profile_rejects_nonsymmetric():
    assert symmetric_profile(Relation.from_tuples(2, [(0, 1)])) is None


@given(relations(), st.sets(st.integers(1, 4)))
def test_flip_is_an_involution(r, coords):
    coords = [c for c in coords if c <= r.arity]
    assert flip(flip(r, coords), coords) == r


def test_flip_example():
    assert flip(make_ham(2, {0}), [1]) == Relation.from_tuples(2, [(1, 0)])
    assert negate(make_ham(3, {1})) == make_ham(3, {2})


def test_promise_relation_checks():
    with pytest.raises(PromiseViolation):
        PromiseRelation.ham(3, {1}, {2})
    with pytest.raises(ArityMismatch):
        PromiseRelation(make_ham(2, {1}), make_ham(3, {1}))
    assert PromiseRelation.ham(3, {1}, {1, 2}).is_symmetric


def test_family_flags_and_names():
    fam = make_family([PromiseRelation.ham(3, {1}, {1, 2}), NOT, SET_ZERO, SET_ONE])
    assert fam.names == ("R0", "NOT", "SET-ZERO", "SET-ONE")
    assert fam.contains_not and fam.contains_set_zero and fam.contains_set_one
    assert fam.symmetric
    assert fam["NOT"] == NOT
    assert fam.max_arity == 3
    assert not make_family([PromiseRelation.ham(3, {1}, {1, 2})]).contains_not


def test_instance_validation():
    fam = make_family([NOT])
    with pytest.raises(SchemaError):
        Instance(2, ((0, (0, 2)),))
    with pytest.raises(ArityMismatch):
        make_instance(fam, 3, [("NOT", (0, 1, 2))])


def test_evaluate_sides():
    fam = make_family([PromiseRelation.ham(3, {1}, {1, 2})])
    inst = make_instance(fam, 3, [(0, (0, 1, 2))])
    assert evaluate(fam, inst, (1, 1, 0), Side.Q)
    assert not evaluate(fam, inst, (1, 1, 0), Side.P)
    with pytest.raises(LengthMismatch):
        evaluate(fam, inst, (1, 1), "p")


def test_brute_force_status_cases():
    fam = make_family([PromiseRelation.ham(3, {1}, {1, 2}), NOT])
    assert brute_force_status(fam, make_instance(fam, 3, [(0, (0, 1, 2))])) is Status.PSAT
    assert brute_force_status(fam, make_instance(fam, 1, [(0, (0, 0, 0))])) is Status.QUNSAT
    # 2*x0 + x1 = 1 and 2*x1 + x0 = 1 clash on the p side; x = (1, 0) lands in q
    gap = make_instance(fam, 2, [(0, (0, 0, 1)), (0, (1, 1, 0))])
    assert brute_force_status(fam, gap) is Status.GAP
    empty = make_family([PromiseRelation(Relation.empty(1), Relation.full(1))])
    assert brute_force_status(empty, make_instance(empty, 1, [(0, (0,))])) is Status.GAP


def test_brute_force_cap():
    fam = make_family([NOT])
    with pytest.raises(TooLarge):
        brute_force_status(fam, Instance(21, ()), max_vars=20)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 9), st.lists(st.tuples(st.integers(0, 2), st.lists(st.integers(0, 8), min_size=3, max_size=3)), max_size=6))
def test_scan_and_dfs_agree(n, raw):
    fam = make_family([PromiseRelation.ham(3, {1}, {1, 2}), PromiseRelation.ham(3, {2}, {1, 2}), PromiseRelation.ham(3, {0, 3}, {0, 3})])
    inst = Instance(n, tuple((r, tuple(v % n for v in vs)) for r, vs in raw))
    for side in (Side.P, Side.Q):
        a = rel_mod._scan([fam.relations[r].p if side is Side.P else fam.relations[r].q for r, _ in inst.clauses], inst, n)
        b = rel_mod._dfs([fam.relations[r].p if side is Side.P else fam.relations[r].q for r, _ in inst.clauses], inst, n)
        assert (a is None) == (b is None)
        if a is not None:
            assert evaluate(fam, inst, a, side) and evaluate(fam, inst, b, side)


def test_find_satisfying_returns_lexicographically_first_by_index():
    fam = make_family([PromiseRelation.ham(2, {1}, {1})])
    assert find_satisfying(fam, make_instance(fam, 2, [(0, (0, 1))]), Side.P) == (1, 0)
