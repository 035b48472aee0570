import pytest
from hypothesis import given, strategies as st

from conftest import omega_functions
from ik_lab.catalog import Bounds, omega_ideals, spaces_upto
from ik_lab.convergence import FunctionSeq
from ik_lab.ideals import FIN, ImproperIdealError, generated, ideality_condition, join, principal
from ik_lab.indexsets import OMEGA, DomainError, EpSet
from ik_lab.points import (
    RealizationError,
    Semantics,
    admissible_partition,
    base_cluster_points,
    cluster_points,
    cluster_points_search,
    limit_points,
    limit_points_search,
    realize_cluster_set,
    verify_padded_closed_form,
    verify_section4,
)
from ik_lab.topology import chain, discrete, is_closed_set, sierpinski

S = sierpinski()
A, B = 0, 1
IDEALS = omega_ideals(6)
SPACES3 = list(spaces_upto(3))
EVENS = generated(OMEGA, EpSet.periodic(2, [0]))
ODDS = generated(OMEGA, EpSet.periodic(2, [1]))


def test_padded_and_trace_differ_on_two_point_instance():
    i, k = principal(2, [0]), principal(2, [1])
    f = FunctionSeq.finite([B, A])
    assert cluster_points(f, i, k, S, Semantics.PADDED) == S.full
    assert cluster_points(f, i, k, S, Semantics.TRACE) == 0b10
    for sem in Semantics:
        assert cluster_points_search(f, i, k, S, sem) == cluster_points(f, i, k, S, sem)


def test_cluster_points_need_proper_ideals():
    with pytest.raises(ImproperIdealError):
        cluster_points(FunctionSeq.finite([A, B]), principal(2, [0, 1]), principal(2, []), S)


def test_fin_cluster_points_are_recurrent_neighbourhoods():
    f = FunctionSeq.periodic([A], [B, B])
    assert base_cluster_points(f, FIN, discrete(2)) == 0b01
    assert base_cluster_points(FunctionSeq.periodic([A, B]), FIN, discrete(2)) == 0b11
    # every neighbourhood of b contains a
    assert base_cluster_points(f, FIN, S) == 0b11


def test_limit_points_are_omega_only():
    with pytest.raises(DomainError):
        limit_points(FunctionSeq.finite([A]), principal(1, []), principal(1, []), S)


@given(omega_functions(k=3, max_p=4, max_q=2), st.sampled_from(SPACES3), st.sampled_from(IDEALS), st.sampled_from(IDEALS))
def test_cluster_sets_closed_and_contain_limits(f, space, i, k):
    if any(v >= space.size for v in f.values_used()):
        return
    c = cluster_points(f, i, k, space)
    assert is_closed_set(space, c)
    assert limit_points(f, i, k, space) & ~c == 0
    if ideality_condition(i, k):
        u = join(i, k)
        assert cluster_points(f, u, u, space) & ~c == 0


@given(omega_functions(k=2, max_p=4, max_q=0), st.sampled_from(IDEALS[:7]), st.sampled_from(IDEALS[:7]))
def test_search_matches_closed_form_on_omega(f, i, k):
    for space in (S, discrete(2)):
        closed = cluster_points(f, i, k, space)
        assert cluster_points_search(f, i, k, space) == closed
        assert limit_points_search(f, i, k, space) == limit_points(f, i, k, space)


def test_limit_search_refuses_large_modulus():
    f = FunctionSeq.periodic([A, B, B, A, B])
    with pytest.raises(ValueError):
        limit_points_search(f, IDEALS[-1], FIN, S)


@pytest.mark.parametrize("space", [S, discrete(3), chain(3)])
def test_realize_round_trip_every_closed_set(space):
    for target in range(1, space.full + 1):
        if not is_closed_set(space, target):
            continue
        for i, k in ((FIN, FIN), (EVENS, FIN), (IDEALS[3], IDEALS[6])):
            f = realize_cluster_set(space, target, i, k)
            assert cluster_points(f, i, k, space) == target


def test_realize_rejections():
    with pytest.raises(RealizationError, match="not closed"):
        realize_cluster_set(S, 0b01)
    with pytest.raises(RealizationError):
        realize_cluster_set(S, 0)
    with pytest.raises(RealizationError, match="ideality"):
        realize_cluster_set(S, 0b10, EVENS, ODDS)


def test_realize_failure_names_residues():
    # I swallows every residue but 0 mod 4, so two disjoint positive classes cannot exist at small moduli
    i = generated(OMEGA, EpSet.periodic(4, [1, 2, 3]))
    with pytest.raises(RealizationError, match="residues in I"):
        realize_cluster_set(discrete(2), 0b11, i, FIN, max_modulus=2)


def test_admissible_partition_pairs_residues():
    classes = admissible_partition(2, 2, EVENS, ODDS)
    assert classes is None  # a single core [1, 0]
    assert admissible_partition(2, 1, EVENS, ODDS) == [[0, 1]]
    assert admissible_partition(4, 2, FIN, FIN) == [[0, 2, 3], [1]]
    assert admissible_partition(2, 3, FIN, FIN) is None


def test_section4_small_battery():
    r = verify_section4(Bounds(k=2, p=3, f=8))
    assert r.instances > 0
    assert r.violations == 0
    assert r.checks["realize round trip, residue pair"].instances > 0


def test_padded_observation_only_gates_under_trace():
    r = verify_section4(Bounds(k=2, p=3, f=8), Semantics.PADDED)
    obs = r.checks["observation: C(I^K) in C(K)"]
    assert not obs.gating and obs.violations > 0
    assert r.violations == 0


def test_padded_closed_form_small():
    r = verify_padded_closed_form(n_max=3, k_max=2)
    assert r.instances > 0 and r.violations == 0
