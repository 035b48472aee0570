import pytest
from hypothesis import given, strategies as st

from conftest import omega_functions
from ik_lab.catalog import Bounds, omega_ideals, spaces_upto
from ik_lab.convergence import (
    Base,
    FunctionSeq,
    ModeError,
    OracleBoundExceeded,
    Sup,
    Verdict,
    bad_set,
    decide,
    effective_ideal,
    limit_set,
    mode_str,
    modify_on_set,
    oracle,
    parse_mode,
    replay_witnesses,
    star,
    verify_section2,
)
from ik_lab.ideals import FIN, generated, is_proper, join, principal
from ik_lab.indexsets import OMEGA, EpSet, Finite
from ik_lab.topology import discrete, indiscrete, mk_space, quotient, sierpinski

S = sierpinski()
A, B = 0, 1
OMEGA_IDEALS = omega_ideals(6)
SPACES3 = list(spaces_upto(3))


def e_instance():
    """Finite(4), I = down-set of {0,1}, K = down-set of {2}, f = b,a,b,a."""
    i, k = principal(4, [0, 1]), principal(4, [2])
    return i, k, FunctionSeq.finite([B, A, B, A])


def test_bad_sets():
    assert bad_set(FunctionSeq.periodic([B, A]), 0b01) == EpSet.periodic(2, [0])
    assert bad_set(FunctionSeq.constant(OMEGA, A), 0b01).is_empty()
    assert bad_set(FunctionSeq.finite([B, A, B, A]), 0b01) == EpSet.finite(4, [0, 2])


def test_e_instance_fast_and_oracle():
    i, k, f = e_instance()
    ik = Sup(i, Base(k))
    v = decide(f, A, ik, S)
    assert v.converges and v.witnesses == (EpSet.finite(4, [2, 3]),)
    assert oracle(f, A, ik, S).converges
    for m in (Base(i), Base(k)):
        v = decide(f, A, m, S)
        assert not v.converges and v.failing_neighborhood == 0b01
        assert not oracle(f, A, m, S).converges


def test_limit_set_on_discrete_is_unique():
    i, k = principal(4, [0]), principal(4, [2])
    f = FunctionSeq.finite([A, A, B, A])
    assert limit_set(f, Sup(i, Base(k)), discrete(2)) == 0b01


def test_indiscrete_space_everything_converges():
    f = FunctionSeq.periodic([0, 1, 2])
    assert limit_set(f, Base(FIN), indiscrete(3)) == 0b111


def test_degenerate_mode_converges_everywhere():
    i, k = generated(OMEGA, EpSet.periodic(2, [0])), generated(OMEGA, EpSet.periodic(2, [1]))
    f = FunctionSeq.periodic([B])
    v = decide(f, A, Sup(i, Base(k)), discrete(2))
    assert v.converges and v.degenerate
    assert oracle(f, A, Sup(i, Base(k)), discrete(2)).converges


def test_discrete_base_convergence_is_eventual_constancy():
    f = FunctionSeq.periodic([A], [B, B, B])
    assert decide(f, A, Base(FIN), discrete(2)).converges
    assert not decide(FunctionSeq.periodic([A, B]), A, Base(FIN), discrete(2)).converges


def test_effective_ideal_absorbs_fin():
    i, k = OMEGA_IDEALS[1], OMEGA_IDEALS[5]
    assert effective_ideal(Sup(i, Sup(k, Base(FIN)))) == join(i, k)
    assert effective_ideal(Base(i)) == i


def test_star_rejected_on_finite_domain():
    with pytest.raises(ModeError):
        star(principal(3, [0]))


@pytest.mark.parametrize(
    "text,expect",
    [
        ("I", "I"),
        ("I*", "I^Fin"),
        ("K", "K"),
        ("I^K", "I^K"),
        ("I^K*", "I^(K^Fin)"),
        ("IuK", "IuK"),
        ("(IuK)*", "IuK^Fin"),
        ("I^(K^J)", "I^(K^J)"),
    ],
)
def test_mode_strings(text, expect):
    named = {"I": OMEGA_IDEALS[1], "K": OMEGA_IDEALS[3], "J": OMEGA_IDEALS[5]}
    named = {n: type(v)(v.domain, v.generators, n) for n, v in named.items()}
    m = parse_mode(text, named)
    got = mode_str(m).replace(str(join(named["I"], named["K"])), "IuK")
    assert got == expect


def test_mode_parse_errors():
    with pytest.raises(Exception):
        parse_mode("I^", {"I": FIN})
    with pytest.raises(Exception):
        parse_mode("Q", {"I": FIN})


@given(
    omega_functions(k=3, max_p=4, max_q=2),
    st.sampled_from(SPACES3),
    st.sampled_from(OMEGA_IDEALS[:6]),
    st.sampled_from(OMEGA_IDEALS[:6]),
    st.integers(0, 2),
)
def test_fast_path_matches_oracle_on_omega(f, space, i, k, x):
    if x >= space.size or any(v >= space.size for v in f.values_used()):
        return
    for m in (Base(i), Sup(i, Base(k)), Sup(i, Sup(k, Base(FIN)))):
        fast = decide(f, x, m, space)
        try:
            slow = oracle(f, x, m, space, max_candidates=1 << 12)
        except OracleBoundExceeded:
            continue
        assert fast.converges == slow.converges
        if fast.converges:
            assert replay_witnesses(f, x, m, space, fast.witnesses)
            assert replay_witnesses(f, x, m, space, slow.witnesses)


@given(omega_functions(k=2), st.sampled_from(OMEGA_IDEALS), st.sampled_from(OMEGA_IDEALS))
def test_monotone_in_both_slots(f, i, k):
    big_i = join(i, OMEGA_IDEALS[3])
    big_k = join(k, OMEGA_IDEALS[4])
    for x in (A, B):
        if decide(f, x, Sup(i, Base(k)), S).converges:
            if is_proper(big_i):
                assert decide(f, x, Sup(big_i, Base(k)), S).converges
            if is_proper(big_k):
                assert decide(f, x, Sup(i, Base(big_k)), S).converges


@given(omega_functions(k=2), st.sampled_from(OMEGA_IDEALS))
def test_k_convergence_implies_ik(f, k):
    for x in (A, B):
        if decide(f, x, Base(k), S).converges:
            assert decide(f, x, Sup(OMEGA_IDEALS[2], Base(k)), S).converges


@given(omega_functions(k=3), st.sampled_from(SPACES3), st.sampled_from(OMEGA_IDEALS), st.data())
def test_continuous_images_keep_limits(f, space, i, data):
    if space.size != 3:
        return
    labels = data.draw(st.lists(st.integers(0, 1), min_size=3, max_size=3))
    blocks = [[space.points[x] for x in range(3) if labels[x] == b] for b in sorted(set(labels))]
    q, qmap = quotient(space, blocks)
    g = f.map(qmap)
    m = Sup(i, Base(FIN))
    for x in range(3):
        if decide(f, x, m, space).converges:
            assert decide(g, qmap(x), m, q).converges


@given(omega_functions(k=2), st.sampled_from(OMEGA_IDEALS), st.integers(0, 1))
def test_modification_on_ideal_member_keeps_verdict(f, i, y):
    for a in list(i.generators) + [EpSet.periodic(1, [], [0, 2])]:
        g = modify_on_set(f, a, FunctionSeq.constant(OMEGA, y))
        for x in (A, B):
            assert decide(f, x, Base(i), S).converges == decide(g, x, Base(i), S).converges


def test_modify_on_set_edges():
    f = FunctionSeq.periodic([A, B])
    c = FunctionSeq.constant(OMEGA, B)
    assert modify_on_set(f, EpSet.empty(OMEGA), c) == f
    assert modify_on_set(f, EpSet.full(OMEGA), c) == c


def test_product_of_ideal_and_star_is_not_single_ideal_convergence():
    """I^K* can hold while I fails: the battery's counterexample, frozen."""
    k = generated(OMEGA, EpSet.periodic(2, [0]))
    f = FunctionSeq.periodic([B, A])
    m = Sup(FIN, Sup(k, Base(FIN)))
    v = oracle(f, A, m, S)
    assert v.converges and replay_witnesses(f, A, m, S, v.witnesses)
    assert not oracle(f, A, Base(FIN), S).converges


def test_section2_small_battery_counts():
    r = verify_section2(Bounds(k=2, n=3, p=2, f=8))
    assert r.instances > 0
    failing = {n for n, c in r.checks.items() if c.violations}
    assert failing <= {"I^K* => I", "I^K* => K"}
    assert r.checks["I^K => IuK"].violations == 0


def test_section2_mutation_is_caught():
    def broken(f, x, m, space):
        # ignores the outer ideal: I^K collapses to K
        if isinstance(m, Sup):
            return decide(f, x, m.inner, space)
        return decide(f, x, m, space)

    r = verify_section2(Bounds(k=2, n=3, p=2, f=6), decide_fn=broken)
    assert r.checks["J-convergence => I^K when J adds I-positive set to K"].violations > 0


def test_verdict_json():
    i, k, f = e_instance()
    out = decide(f, A, Sup(i, Base(k)), S).to_json(S)
    assert out == {"converges": True, "degenerate": False, "method": "fast", "witnesses": [[2, 3]]}
    assert Verdict(False, failing_neighborhood=1).to_json(S)["failing_neighborhood"] == ["a"]


def test_function_validation():
    with pytest.raises(ValueError):
        decide(FunctionSeq.periodic([2]), 0, Base(FIN), S)
    f = FunctionSeq.finite([A, B])
    assert f.domain == Finite(2) and f(1) == B
    assert FunctionSeq.periodic([A, B, A, B], [A, B]) == FunctionSeq.periodic([A, B])
    with pytest.raises(Exception):
        decide(f, 0, Base(FIN), mk_space("ab", [[], ["a", "b"]]))
