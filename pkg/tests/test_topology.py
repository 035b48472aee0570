import pytest
from hypothesis import given, strategies as st

from ik_lab.catalog import spaces_upto
from ik_lab.topology import (
    TopologyError,
    chain,
    closure,
    discrete,
    disjoint_sum,
    enumerate_topologies,
    enumerate_topologies_bruteforce,
    inclusion,
    indiscrete,
    interior,
    is_closed_set,
    is_continuous,
    is_discrete,
    is_hausdorff,
    is_open_set,
    is_t1,
    mk_space,
    quotient,
    sierpinski,
    subspace,
)

SPACES3 = [sp for sp in spaces_upto(3)]


@pytest.mark.parametrize("k,count", [(1, 1), (2, 4), (3, 29), (4, 355)])
def test_labeled_topology_counts(k, count):
    spaces = list(enumerate_topologies(k))
    assert len(spaces) == count
    assert len({sp.opens for sp in spaces}) == count
    assert sorted(tuple(sorted(sp.opens)) for sp in spaces) == sorted(
        tuple(sorted(f)) for f in enumerate_topologies_bruteforce(k)
    )


def test_validation_names_the_offending_sets():
    with pytest.raises(TopologyError, match="empty set"):
        mk_space("ab", [["a"], ["a", "b"]])
    with pytest.raises(TopologyError, match="whole space"):
        mk_space("ab", [[], ["a"]])
    with pytest.raises(TopologyError, match="union of"):
        mk_space("abc", [[], ["a"], ["b"], ["a", "b", "c"]])
    with pytest.raises(TopologyError, match="unknown point"):
        mk_space("ab", [[], ["z"], ["a", "b"]])


def test_builtins():
    s = sierpinski()
    assert s.points == ("a", "b") and s.min_nbhd == (0b01, 0b11)
    assert is_discrete(discrete(3)) and is_hausdorff(discrete(3))
    assert indiscrete(3).opens == (0, 0b111)
    assert chain(3).opens == (0, 0b1, 0b11, 0b111)
    assert not is_t1(s) and is_t1(discrete(2))


def test_finite_t1_is_discrete():
    for sp in spaces_upto(4):
        assert is_t1(sp) == is_discrete(sp) == is_hausdorff(sp)


@pytest.mark.parametrize("space", SPACES3, ids=str)
def test_closure_interior_duality(space):
    for a in range(space.full + 1):
        c = closure(space, a)
        assert is_closed_set(space, c) and a & ~c == 0
        assert interior(space, a) == space.full & ~closure(space, space.full & ~a)
        assert is_open_set(space, interior(space, a))


@pytest.mark.parametrize("space", SPACES3, ids=str)
def test_minimal_neighbourhood_is_least_open(space):
    for x in range(space.size):
        m = space.min_nbhd[x]
        assert is_open_set(space, m) and (m >> x) & 1
        assert all(m & ~u == 0 for u in space.opens_containing(x))


def test_quotient_of_sierpinski_to_a_point():
    q, qmap = quotient(sierpinski(), [["a", "b"]])
    assert q.points == ("a+b",) and q.opens == (0, 1)
    assert is_continuous(qmap)


@given(st.sampled_from(SPACES3), st.data())
def test_quotient_maps_are_continuous(space, data):
    labels = data.draw(st.lists(st.integers(0, 2), min_size=space.size, max_size=space.size))
    blocks = [[space.points[x] for x in range(space.size) if labels[x] == b] for b in sorted(set(labels))]
    q, qmap = quotient(space, blocks)
    assert is_continuous(qmap)
    # the quotient topology is the finest making the map continuous
    for a in range(q.full + 1):
        assert is_open_set(q, a) == is_open_set(space, qmap.preimage(a))


def test_subspace_and_inclusion():
    c = chain(3)
    sub = subspace(c, ["b", "c"])
    assert sub.opens == (0, 0b01, 0b11)
    assert is_continuous(inclusion(c, 0b110))


def test_disjoint_sum_opens_are_products():
    s = disjoint_sum([sierpinski(), discrete(1)])
    assert s.points == ("0.a", "0.b", "1.a")
    assert len(s.opens) == 3 * 2
    with pytest.raises(TopologyError):
        subspace(s, 0)
