import dataclasses

import pytest
from hypothesis import given, strategies as st

from ik_lab.catalog import Bounds, omega_ideals, spaces_upto
from ik_lab.convergence import Base, Sup, decide, star
from ik_lab.ideals import FIN, generated, principal
from ik_lab.indexsets import OMEGA, EpSet
from ik_lab.seqspace import (
    BOUNDED_SEARCH,
    CHARACTERIZATION,
    closure_union,
    is_mode_closed,
    is_mode_open,
    is_sequential,
    mode_open_family,
    verify_section3,
)
from ik_lab.topology import chain, closure, discrete, indiscrete, is_open_set, sierpinski

S = sierpinski()
A, B = 0, 1
IDEALS = omega_ideals(6)
EVENS = generated(OMEGA, EpSet.periodic(2, [0]))
ODDS = generated(OMEGA, EpSet.periodic(2, [1]))


def test_sierpinski_opens():
    assert is_mode_open(S, 0b01, FIN, FIN).is_mode_open
    v = is_mode_open(S, 0b10, FIN, FIN)
    assert not v.is_mode_open
    f, x = v.counterexample
    assert x == B and f.values_used() == {A}
    assert v.to_json(S)["counterexample"] == {"function": {"head": [], "period": ["a"]}, "limit": "b"}


def test_improper_join_only_trivial_sets():
    assert not is_mode_open(S, 0b01, EVENS, ODDS).is_mode_open
    space = discrete(2)
    assert not is_mode_open(space, 0b01, EVENS, ODDS).is_mode_open
    assert mode_open_family(space, EVENS, ODDS) == [0, 0b11]
    assert is_sequential(space, EVENS, ODDS)
    assert is_mode_closed(space, 0b11, EVENS, ODDS)
    assert not is_mode_closed(space, 0b10, EVENS, ODDS)


def test_mode_closed_is_complement_of_mode_open():
    assert is_mode_closed(S, 0b10, FIN, FIN)
    assert not is_mode_closed(S, 0b01, FIN, FIN)


def test_accepts_modes_and_methods():
    for method in (CHARACTERIZATION, BOUNDED_SEARCH, "both"):
        assert is_mode_open(S, 0b01, star(EVENS), method=method).is_mode_open
    with pytest.raises(ValueError):
        is_mode_open(S, 0b01, FIN, FIN, method="guess")
    with pytest.raises(ValueError):
        is_mode_open(S, 0b100, FIN, FIN)
    with pytest.raises(TypeError):
        is_mode_open(S, 0b01, FIN)


def test_finite_domain_support():
    i, k = principal(4, [0, 1]), principal(4, [2])
    assert is_mode_open(S, 0b01, i, k).is_mode_open
    assert not is_mode_open(S, 0b10, i, k).is_mode_open
    # join is everything: the degenerate pair on Finite(2)
    assert mode_open_family(S, principal(2, [0]), principal(2, [1])) == [0, 0b11]


@pytest.mark.parametrize("space", [S, discrete(3), indiscrete(3), chain(3)])
def test_proper_modes_are_sequential(space):
    for i in IDEALS[:6]:
        assert is_sequential(space, i, FIN)
        assert set(mode_open_family(space, i, FIN)) == set(space.opens)


@given(st.sampled_from(list(spaces_upto(4))), st.sampled_from(IDEALS), st.sampled_from(IDEALS), st.data())
def test_counterexamples_replay(space, i, k, data):
    o = data.draw(st.integers(0, space.full))
    v = is_mode_open(space, o, i, k)
    assert v.is_mode_open == (v.counterexample is None)
    if v.counterexample:
        f, x = v.counterexample
        assert (o >> x) & 1 and not any((o >> y) & 1 for y in f.values_used())
        assert decide(f, x, Sup(i, Base(k)), space).converges


@given(st.sampled_from(list(spaces_upto(4))), st.data())
def test_closure_is_union_of_point_closures(space, data):
    a = data.draw(st.integers(0, space.full))
    assert closure(space, a) == closure_union(space, a)


def test_section3_small_battery():
    r = verify_section3(Bounds(k=2, n=2, p=3, f=6))
    assert r.instances > 0 and r.violations == 0
    assert r.checks["open => mode-open"].note


def _fake_discrete(space):
    return dataclasses.replace(space, min_nbhd=tuple(1 << x for x in range(space.size)))


def test_section3_mutation_is_caught():
    r = verify_section3(Bounds(k=2, n=2, p=3, f=6), space_hook=_fake_discrete)
    assert r.checks["mode-open => open (sequential space)"].violations > 0
