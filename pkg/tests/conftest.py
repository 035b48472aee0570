from hypothesis import settings, strategies as st

from ik_lab.convergence import FunctionSeq
from ik_lab.indexsets import EpSet

settings.register_profile("default", max_examples=150, deadline=None)
settings.load_profile("default")

# membership is checked on a window long enough to cover every head plus
# several full periods of every modulus drawn below
WINDOW = 120


@st.composite
def ep_sets(draw, max_p=6, max_q=6):
    p = draw(st.integers(1, max_p))
    q = draw(st.integers(0, max_q))
    tail = draw(st.integers(0, (1 << p) - 1))
    head = draw(st.integers(0, (1 << q) - 1))
    return EpSet.raw_omega(head, q, p, tail)


@st.composite
def finite_sets(draw, n=6):
    return EpSet.from_mask(n, draw(st.integers(0, (1 << n) - 1)))


@st.composite
def omega_functions(draw, k=3, max_p=5, max_q=3):
    period = draw(st.lists(st.integers(0, k - 1), min_size=1, max_size=max_p))
    head = draw(st.lists(st.integers(0, k - 1), max_size=max_q))
    return FunctionSeq.periodic(period, head)


def elements(a: EpSet, window: int = WINDOW) -> frozenset[int]:
    return frozenset(a.elements_below(window))


# one line per acceptance criterion, collected by tests/test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
