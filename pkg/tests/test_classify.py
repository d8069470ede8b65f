from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _corpus import DISC_K1, EVEN_BALANCED, HITTING, SAT_K1, SAT_K1_EASY
from pcsp.classify import (
    canonical_excluding,
    c_fixing_scan,
    classify,
    classify_explicit,
    shift_down,
    shrink_top,
)
from pcsp.errors import FamilyPresent, HypothesisViolated, NonSymmetric, NotHard, OutOfScope
from pcsp.polymorphisms import FamilyKind, has_family
from pcsp.relations import NOT, SET_ONE, SET_ZERO, PromiseRelation, Relation, make_family

K = FamilyKind
H = PromiseRelation.ham


def test_classify_examples():
    assert classify(SAT_K1).hard
    c = classify(SAT_K1_EASY)
    assert c.tractable and c.kind is K.MAJ
    c = classify(make_family([H(3, {1}, {1, 2}), NOT]))
    assert c.tractable and c.kind is K.AT
    assert classify(EVEN_BALANCED).kind is K.MAJ
    assert classify(DISC_K1).hard


def test_classify_without_not_probes_constants_first():
    c = classify(make_family([H(3, {1}, {0, 1})]))
    assert c.kind is K.ZERO
    assert classify(HITTING).kind is K.AT


def test_classify_out_of_scope():
    nonsym = make_family([PromiseRelation.csp(Relation.from_tuples(2, [(0, 1)]))])
    assert classify(nonsym).verdict == "out-of-scope"
    # no tractable kind and nothing forces foldedness
    unfolded = make_family([H(3, {1, 2}, {1, 2})])
    assert classify(unfolded).verdict == "out-of-scope"
    assert classify(unfolded, assume_folded=True).hard


def test_classify_explicit_examples():
    assert classify_explicit(3, {1, 3}, {1, 3}).kind is K.PAR
    assert classify_explicit(3, {2}, {1, 2, 3}).tractable
    assert classify_explicit(3, {1, 2, 3}, {1, 2, 3}).hard
    with pytest.raises(HypothesisViolated):
        classify_explicit(3, {0, 3}, {0, 3})


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 5).flatmap(lambda k: st.tuples(
    st.just(k), st.frozensets(st.integers(0, k), min_size=1), st.frozensets(st.integers(0, k)))))
def test_classify_agrees_with_explicit(arg):
    k, S, extra = arg
    T = S | extra
    if not S & set(range(1, k)):
        return
    fam = make_family([H(k, S, T), NOT, SET_ZERO, SET_ONE])
    assert classify(fam).tractable == classify_explicit(k, S, T).tractable


def test_shrink_and_shift_examples():
    assert shrink_top(H(3, {1}, {1, 2, 3})) == H(2, {1}, {1, 2})
    assert shrink_top(H(2, {0, 2}, {0, 1, 2})) == H(1, {0}, {0, 1})
    assert shift_down(H(3, {2}, {1, 2, 3})) == H(2, {1}, {0, 1, 2})
    assert shift_down(H(2, {0}, {0, 1})) == H(1, set(), {0})
    with pytest.raises(NonSymmetric):
        shrink_top(PromiseRelation.csp(Relation.from_tuples(2, [(0, 1)])))


def _with_constants(pr):
    return make_family([pr, NOT, SET_ZERO, SET_ONE])


def test_canonical_examples():
    cf = canonical_excluding(_with_constants(H(3, {1}, {1, 2})), K.MAJ)
    assert cf.relation == H(3, {2}, {0, 1, 2})
    cf = canonical_excluding(_with_constants(H(3, {1, 2, 3}, {1, 2, 3})), K.AT)
    assert cf.relation == H(3, {0, 2}, {0, 1, 2})
    with pytest.raises(FamilyPresent):
        canonical_excluding(_with_constants(H(3, {1}, {1, 2})), K.AT)
    with pytest.raises(OutOfScope):
        canonical_excluding(make_family([H(3, {1}, {1, 2})]), K.MAJ)


@settings(max_examples=120, deadline=None)
@given(st.integers(2, 6).flatmap(lambda k: st.tuples(
    st.just(k), st.frozensets(st.integers(0, k), min_size=1), st.frozensets(st.integers(0, k)))),
    st.sampled_from([K.MAJ, K.AT]))
def test_canonical_form_still_excludes_kind(arg, kind):
    k, S, extra = arg
    fam = _with_constants(H(k, S, S | extra))
    if has_family(fam, kind):
        return
    cf = canonical_excluding(fam, kind)
    assert not has_family([cf.relation], kind)
    assert cf.trace


def test_c_fixing_scan_examples():
    assert c_fixing_scan(SAT_K1, 3).C <= 2
    one_in_three = make_family([H(3, {1}, {1}), NOT])
    assert c_fixing_scan(one_in_three, 3).C >= 1
    with pytest.raises(NotHard):
        c_fixing_scan(SAT_K1_EASY, 3)
