import pytest
from hypothesis import given, strategies as st

from conftest import elements, ep_sets, finite_sets
from ik_lab.ideals import (
    FIN,
    I0,
    ImproperIdealError,
    canonical_witness,
    contains,
    enumerate_ideals_finite,
    extend_by_member,
    generated,
    ideality_condition,
    in_dual_filter,
    is_positive,
    is_proper,
    is_subideal,
    join,
    principal,
)
from ik_lab.indexsets import OMEGA, EpSet, Finite, complement, union

EVENS = EpSet.periodic(2, [0])
ODDS = EpSet.periodic(2, [1])


def in_ideal_brute(gens, a) -> bool:
    """A is in the ideal iff it sits inside the generator union up to finitely many
    indices; with periods <= 6 and heads < 7, agreement on [60, 120) settles it."""
    covered = frozenset().union(*(elements(g) for g in gens)) if gens else frozenset()
    return all(s in covered for s in elements(a) if s >= 60)


@given(st.lists(ep_sets(), max_size=3), ep_sets())
def test_omega_membership_matches_definition(gens, a):
    assert contains(generated(OMEGA, *gens), a) == in_ideal_brute(gens, a)


@given(st.integers(0, 62), finite_sets())
def test_finite_membership_is_down_set(b, a):
    ideal = generated(Finite(6), EpSet.from_mask(6, b))
    assert contains(ideal, a) == (a.mask & ~b == 0)


def test_fin_and_i0_agree_on_representable_sets():
    for a in [EpSet.periodic(1, [], [1, 4]), EpSet.periodic(5, [2]), EpSet.empty(OMEGA)]:
        assert contains(FIN, a) == contains(I0, a) == (a.tail == 0)


def test_proper_ideals_on_finite_domain_count():
    for n in range(1, 6):
        ideals = list(enumerate_ideals_finite(n))
        assert len(ideals) == 2**n - 1
        assert all(is_proper(i) for i in ideals)


def test_join_of_evens_and_odds_is_improper():
    i, k = generated(OMEGA, EVENS), generated(OMEGA, ODDS)
    assert is_proper(i) and is_proper(k)
    assert not is_proper(join(i, k))
    assert not ideality_condition(i, k)
    assert ideality_condition(i, generated(OMEGA, EpSet.periodic(4, [0])))


def test_finite_ideality_boundary():
    assert not ideality_condition(principal(2, [0]), principal(2, [1]))
    assert ideality_condition(principal(3, [0]), principal(3, [1]))


def test_dual_filter_and_positive_sets():
    i = generated(OMEGA, EVENS)
    assert in_dual_filter(i, ODDS)
    assert not in_dual_filter(i, EpSet.periodic(4, [1]))
    assert is_positive(i, EpSet.periodic(4, [1]))
    assert not is_positive(i, EpSet.periodic(4, [2]))
    with pytest.raises(ImproperIdealError):
        in_dual_filter(principal(2, [0, 1]), EpSet.finite(2, []))


def test_canonical_witness_is_complement_of_generator_union():
    i = generated(OMEGA, EpSet.periodic(3, [0]), EpSet.periodic(4, [1]))
    w = canonical_witness(i)
    assert w == complement(union(EpSet.periodic(3, [0]), EpSet.periodic(4, [1])))
    assert in_dual_filter(i, w)
    with pytest.raises(ImproperIdealError):
        canonical_witness(generated(OMEGA, EpSet.full(OMEGA)))


def test_extend_by_member_and_subideals():
    k = generated(OMEGA, EpSet.periodic(4, [0]))
    j = extend_by_member(k, EpSet.periodic(4, [2]))
    assert contains(j, EVENS) and not contains(k, EVENS)
    assert is_subideal(k, j) and not is_subideal(j, k)
    assert is_subideal(FIN, k)


@given(st.integers(0, 14), st.integers(0, 14))
def test_join_is_the_least_upper_bound(bi, bk):
    i = generated(Finite(4), EpSet.from_mask(4, bi))
    k = generated(Finite(4), EpSet.from_mask(4, bk))
    jk = join(i, k)
    assert is_subideal(i, jk) and is_subideal(k, jk)
    assert jk.grand_union.mask == bi | bk
