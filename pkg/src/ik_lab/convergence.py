"""Convergence modes and their two evaluators.

A mode is a tree ``Base(I)`` / ``Sup(I, inner)``:

* ``Base(I)``: f converges to x when every neighbourhood's bad set
  ``{s : f(s) not in U}`` lies in ``I``;
* ``Sup(I, inner)``: some ``M`` in the dual filter of ``I`` makes the
  function ``g`` (``f`` on ``M``, ``x`` off ``M``) ``inner``-convergent.

``I^K`` is ``Sup(I, Base(K))``, ``I*`` is ``Sup(I, Base(Fin))``.

Fast path.  In a finite (Alexandrov) space only the minimal
neighbourhood of ``x`` matters, and the largest ``I``-set is the union
of ``I``'s generators.  Unwinding the tree, f converges to x in mode m
iff the bad set of the minimal neighbourhood lies in the join of every
ideal appearing in m (the *effective ideal*), and the complement of
each ``Sup`` ideal's generator union is a working witness.  ``oracle``
evaluates the definition literally and is used to cross-check.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from functools import lru_cache
from itertools import combinations
from math import lcm
from typing import Iterator, Sequence

from . import kernels
from .ideals import (
    FIN,
    I0,
    Ideal,
    contains,
    extend_by_member,
    is_proper,
    is_subideal,
    join,
)
from .indexsets import (
    OMEGA,
    DomainError,
    EpSet,
    Finite,
    IndexDomain,
    complement,
    union,
)
from .report import Report
from .topology import FiniteSpace

__all__ = [
    "ModeError",
    "OracleBoundExceeded",
    "Base",
    "Sup",
    "Mode",
    "star",
    "union_mode",
    "union_star",
    "mode_domain",
    "mode_str",
    "parse_mode",
    "FunctionSeq",
    "Verdict",
    "bad_set",
    "hit_set",
    "effective_ideal",
    "converges_bad",
    "decide",
    "oracle",
    "limit_set",
    "modify_on_set",
    "replay_witnesses",
    "verify_section2",
]


class ModeError(ValueError):
    pass


class OracleBoundExceeded(RuntimeError):
    """The definition-faithful search hit its candidate budget."""


# ---------------------------------------------------------------------------
# modes


@dataclass(frozen=True)
class Base:
    ideal: Ideal


@dataclass(frozen=True)
class Sup:
    ideal: Ideal
    inner: "Mode"


Mode = Base | Sup


def star(i: Ideal) -> Sup:
    if i.domain != OMEGA:
        raise ModeError(f"star modes need omega (Fin is improper on {i.domain})")
    return Sup(i, Base(FIN))


def union_mode(i: Ideal, k: Ideal) -> Base:
    return Base(join(i, k))


def union_star(i: Ideal, k: Ideal) -> Sup:
    return star(join(i, k))


def _ideals_of(m: Mode) -> Iterator[Ideal]:
    while isinstance(m, Sup):
        yield m.ideal
        m = m.inner
    yield m.ideal


def mode_domain(m: Mode) -> IndexDomain:
    doms = {i.domain for i in _ideals_of(m)}
    if len(doms) != 1:
        raise ModeError(f"mode mixes index domains: {sorted(map(str, doms))}")
    return doms.pop()


def mode_str(m: Mode) -> str:
    if isinstance(m, Base):
        return str(m.ideal)
    inner = mode_str(m.inner)
    if isinstance(m.inner, Sup):
        inner = f"({inner})"
    return f"{m.ideal}^{inner}"


_TOKEN = re.compile(r"\s*(?:([A-Z][a-tv-z0-9_]*)|(u|∪)|(\^)|(\*)|(\()|(\)))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ModeError(f"unexpected character {text[pos]!r} at position {pos} in mode {text!r}")
        kind = ("name", "union", "sup", "star", "lp", "rp")[m.lastindex - 1]
        out.append((kind, m.group(m.lastindex)))
        pos = m.end()
    return out


class _ModeParser:
    def __init__(self, text: str, ideals: dict[str, Ideal]):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.ideals = ideals

    def peek(self) -> str | None:
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def take(self, kind: str) -> str:
        if self.peek() != kind:
            raise ModeError(f"expected {kind} at token {self.i} in mode {self.text!r}")
        val = self.toks[self.i][1]
        self.i += 1
        return val

    def lookup(self, name: str) -> Ideal:
        if name in self.ideals:
            return self.ideals[name]
        if name == "Fin":
            return FIN
        if name == "I0":
            return I0
        raise ModeError(f"unknown ideal {name!r} in mode {self.text!r}")

    def ideal_union(self) -> Ideal:
        """NAME ('u' NAME)* or a parenthesised union."""
        if self.peek() == "lp":
            self.take("lp")
            ideal = self.ideal_union()
            self.take("rp")
        else:
            ideal = self.lookup(self.take("name"))
        while self.peek() == "union":
            self.take("union")
            if self.peek() == "lp":
                self.take("lp")
                other = self.ideal_union()
                self.take("rp")
            else:
                other = self.lookup(self.take("name"))
            ideal = join(ideal, other)
        return ideal

    def mode(self) -> Mode:
        start = self.i
        try:
            ideal = self.ideal_union()
        except ModeError:
            self.i = start
            ideal = None
        if ideal is None:
            self.take("lp")
            inner = self.mode()
            self.take("rp")
            if self.peek() in ("sup", "star"):
                raise ModeError(f"a parenthesised mode cannot be starred or raised in {self.text!r}")
            return inner
        if self.peek() == "star":
            self.take("star")
            return star(ideal)
        if self.peek() == "sup":
            self.take("sup")
            return Sup(ideal, self.mode())
        return Base(ideal)

    def parse(self) -> Mode:
        m = self.mode()
        if self.i != len(self.toks):
            raise ModeError(f"trailing input at token {self.i} in mode {self.text!r}")
        mode_domain(m)
        return m


def parse_mode(text: str, ideals: dict[str, Ideal]) -> Mode:
    """Parse ``"I"``, ``"I*"``, ``"I^K"``, ``"I^K*"``, ``"IuK"``, ``"(IuK)*"``, ``"I^(K^J)"``..."""
    return _ModeParser(text, ideals).parse()


# ---------------------------------------------------------------------------
# functions S -> X


def _min_period(vals: Sequence[int]) -> int:
    p = len(vals)
    for d in range(1, p):
        if p % d == 0 and all(vals[r] == vals[r % d] for r in range(p)):
            return d
    return p


@dataclass(frozen=True)
class FunctionSeq:
    """A function from the index domain into point indices ``0..k-1``.

    On ``Finite(n)`` the values are ``head`` (length n) and ``period`` is
    empty.  On omega, ``f(s) = head[s]`` for ``s < len(head)`` and
    ``f(s) = period[s % len(period)]`` beyond, kept canonical (minimal
    period, then minimal head).
    """

    domain: IndexDomain
    head: tuple[int, ...]
    period: tuple[int, ...] = ()

    @classmethod
    def finite(cls, values: Sequence[int]) -> FunctionSeq:
        values = tuple(int(v) for v in values)
        return cls(Finite(len(values)), values, ())

    @classmethod
    def periodic(cls, period: Sequence[int], head: Sequence[int] = ()) -> FunctionSeq:
        period = tuple(int(v) for v in period)
        if not period:
            raise ValueError("periodic part must be nonempty")
        period = period[: _min_period(period)]
        p = len(period)
        head = list(int(v) for v in head)
        while head and head[-1] == period[(len(head) - 1) % p]:
            head.pop()
        return cls(OMEGA, tuple(head), period)

    @classmethod
    def constant(cls, domain: IndexDomain, x: int) -> FunctionSeq:
        if isinstance(domain, Finite):
            return cls.finite([x] * domain.n)
        return cls.periodic([x])

    @property
    def q(self) -> int:
        return len(self.head) if self.domain == OMEGA else 0

    @property
    def p(self) -> int:
        return len(self.period)

    def __call__(self, s: int) -> int:
        if self.domain != OMEGA:
            return self.head[s]
        if s < len(self.head):
            return self.head[s]
        return self.period[s % len(self.period)]

    def values_used(self) -> set[int]:
        return set(self.head) | set(self.period)

    def map(self, fn) -> FunctionSeq:
        if self.domain != OMEGA:
            return FunctionSeq.finite([fn(v) for v in self.head])
        return FunctionSeq.periodic([fn(v) for v in self.period], [fn(v) for v in self.head])

    def to_json(self, labels: Sequence[str]) -> dict:
        if self.domain != OMEGA:
            return {"values": [labels[v] for v in self.head]}
        return {"head": [labels[v] for v in self.head], "period": [labels[v] for v in self.period]}

    def __str__(self) -> str:
        if self.domain != OMEGA:
            return f"f{list(self.head)}"
        return f"f(head={list(self.head)}, period={list(self.period)})"


def _check_function(f: FunctionSeq, space: FiniteSpace) -> None:
    if any(not 0 <= v < space.size for v in f.values_used()):
        raise ValueError(f"{f} takes values outside the {space.size}-point space")


def _membership(f: FunctionSeq, target: int, want_in: bool) -> EpSet:
    def test(v: int) -> bool:
        return bool((target >> v) & 1) == want_in

    if f.domain != OMEGA:
        mask = 0
        for s, v in enumerate(f.head):
            if test(v):
                mask |= 1 << s
        return EpSet.from_mask(f.domain, mask)
    head = sum(1 << s for s, v in enumerate(f.head) if test(v))
    tail = sum(1 << r for r, v in enumerate(f.period) if test(v))
    return EpSet.raw_omega(head, len(f.head), len(f.period), tail)


def bad_set(f: FunctionSeq, u: int) -> EpSet:
    """``{s : f(s) not in U}`` for a point-set mask ``U``."""
    if f.domain != OMEGA:
        return EpSet.from_mask(f.domain, kernels.bad_mask(f.head, u))
    return _membership(f, u, False)


def hit_set(f: FunctionSeq, u: int) -> EpSet:
    """``{s : f(s) in U}``."""
    return _membership(f, u, True)


def modify_on_set(f: FunctionSeq, a: EpSet, replacement: FunctionSeq) -> FunctionSeq:
    """``replacement`` on ``A``, ``f`` elsewhere."""
    if not (f.domain == a.domain == replacement.domain):
        raise DomainError("function, set and replacement must share a domain")
    if f.domain != OMEGA:
        return FunctionSeq.finite(
            [replacement.head[s] if (a.head >> s) & 1 else f.head[s] for s in range(f.domain.n)]
        )
    q = max(f.q, a.q, replacement.q)
    p = lcm(f.p, a.p, replacement.p)

    def value(s: int) -> int:
        return replacement(s) if s in a else f(s)

    return FunctionSeq.periodic([value(q + ((r - q) % p)) for r in range(p)], [value(s) for s in range(q)])


# ---------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class Verdict:
    converges: bool
    witnesses: tuple[EpSet, ...] = ()
    failing_neighborhood: int | None = None
    degenerate: bool = False
    method: str = "fast"

    def to_json(self, space: FiniteSpace | None = None) -> dict:
        out = {
            "converges": self.converges,
            "degenerate": self.degenerate,
            "method": self.method,
            "witnesses": [w.to_json() for w in self.witnesses],
        }
        if self.failing_neighborhood is not None:
            out["failing_neighborhood"] = (
                space.to_labels(self.failing_neighborhood) if space else self.failing_neighborhood
            )
        return out


@lru_cache(maxsize=4096)
def effective_ideal(m: Mode) -> Ideal:
    """Join of every ideal in the mode tree."""
    if isinstance(m, Base):
        return m.ideal
    return join(m.ideal, effective_ideal(m.inner))


def converges_bad(bad: EpSet, m: Mode) -> bool:
    """Fast-path verdict from the minimal-neighbourhood bad set alone."""
    return contains(effective_ideal(m), bad)


def _check_instance(f: FunctionSeq, x: int, m: Mode, space: FiniteSpace) -> None:
    if not 0 <= x < space.size:
        raise ValueError(f"point index {x} outside the space")
    _check_function(f, space)
    if mode_domain(m) != f.domain:
        raise DomainError(f"mode lives on {mode_domain(m)} but the function on {f.domain}")


def decide(f: FunctionSeq, x: int, m: Mode, space: FiniteSpace) -> Verdict:
    _check_instance(f, x, m, space)
    bad = bad_set(f, space.min_nbhd[x])
    eff = effective_ideal(m)
    degenerate = not is_proper(eff)
    if not contains(eff, bad):
        return Verdict(False, failing_neighborhood=space.min_nbhd[x], degenerate=degenerate)
    witnesses = []
    node = m
    while isinstance(node, Sup):
        witnesses.append(complement(node.ideal.grand_union))
        node = node.inner
    return Verdict(True, tuple(witnesses), degenerate=degenerate)


def _witness_candidates(ideal: Ideal, head_window: int | None) -> Iterator[EpSet]:
    """Members of the dual filter, as complements of ideal members.

    Finite domain: every complement of a subset of the generator union.
    Omega: complements of (a union of generators) u (a subset of the head
    window); any other dual-filter member differs from one of these by
    a finite set.
    """
    dom = ideal.domain
    if dom != OMEGA:
        g = ideal.grand_union.head
        j = g
        while True:
            yield complement(EpSet.from_mask(dom, j))
            if j == 0:
                return
            j = (j - 1) & g
    gens = ideal.generators
    window = head_window if head_window is not None else 0
    for size in range(len(gens), -1, -1):
        for sub in combinations(gens, size):
            base = EpSet.empty(OMEGA)
            for gset in sub:
                base = union(base, gset)
            for hmask in range(1 << window):
                extra = EpSet.raw_omega(hmask, window, 1, 0)
                yield complement(union(base, extra))


def default_head_window(f: FunctionSeq, m: Mode) -> int:
    """Max head length plus twice the lcm of all moduli involved."""
    q, p = f.q, f.p
    for ideal in _ideals_of(m):
        for gset in ideal.generators:
            q, p = max(q, gset.q), lcm(p, gset.p)
    return q + 2 * p


def _oracle(f, x, m, space, window, budget) -> list[EpSet] | None:
    if isinstance(m, Base):
        for u in space.opens_containing(x):
            if not contains(m.ideal, bad_set(f, u)):
                return None
        return []
    const = FunctionSeq.constant(f.domain, x)
    for cand in _witness_candidates(m.ideal, window):
        budget[0] -= 1
        if budget[0] < 0:
            raise OracleBoundExceeded("witness search exceeded its candidate budget")
        g = modify_on_set(f, complement(cand), const)
        chain = _oracle(g, x, m.inner, space, window, budget)
        if chain is not None:
            return [cand] + chain
    return None


def oracle(
    f: FunctionSeq,
    x: int,
    m: Mode,
    space: FiniteSpace,
    *,
    head_window: int | None = None,
    max_candidates: int = 1 << 16,
) -> Verdict:
    """Evaluate the mode definition literally.

    Every open around ``x`` is tested and witnesses are searched
    exhaustively.  On omega the search covers finite head subsets of
    ``[0, head_window)`` (default: :func:`default_head_window`); if the
    search would visit more than ``max_candidates`` witnesses it raises
    :class:`OracleBoundExceeded` instead of guessing.
    """
    _check_instance(f, x, m, space)
    if f.domain == OMEGA and head_window is None:
        head_window = default_head_window(f, m)
    budget = [max_candidates]
    chain = _oracle(f, x, m, space, head_window, budget)
    degenerate = not is_proper(effective_ideal(m))
    if chain is None:
        failing = None
        for u in space.opens_containing(x):
            if isinstance(m, Base) and not contains(m.ideal, bad_set(f, u)):
                failing = u
                break
        return Verdict(False, failing_neighborhood=failing, degenerate=degenerate, method="oracle")
    return Verdict(True, tuple(chain), degenerate=degenerate, method="oracle")


def replay_witnesses(f: FunctionSeq, x: int, m: Mode, space: FiniteSpace, witnesses: Sequence[EpSet]) -> bool:
    """Check a witness chain against the definition (dual-filter membership included)."""
    const = FunctionSeq.constant(f.domain, x)
    g, node = f, m
    for w in witnesses:
        if not isinstance(node, Sup):
            return False
        if not contains(node.ideal, complement(w)):
            return False
        g = modify_on_set(g, complement(w), const)
        node = node.inner
    if not isinstance(node, Base):
        return False
    return all(contains(node.ideal, bad_set(g, u)) for u in space.opens_containing(x))


def limit_set(f: FunctionSeq, m: Mode, space: FiniteSpace) -> int:
    """Mask of all points ``f`` converges to."""
    return sum(1 << x for x in range(space.size) if decide(f, x, m, space).converges)


# ---------------------------------------------------------------------------
# section battery: relations between modes

from . import catalog  # noqa: E402  (catalog needs FunctionSeq)


def _named(i: Ideal, name: str) -> Ideal:
    return replace(i, name=name)


def _pair_modes(i: Ideal, k: Ideal, js: Sequence[Ideal]) -> dict[str, Mode]:
    modes: dict[str, Mode] = {
        "I": Base(i),
        "K": Base(k),
        "I^K": Sup(i, Base(k)),
        "IuK": union_mode(i, k),
    }
    for idx, j in enumerate(js):
        modes[f"I^(K^J{idx})"] = Sup(i, Sup(k, Base(j)))
    if i.domain == OMEGA:
        modes.update(
            {
                "I*": star(i),
                "K*": star(k),
                "I^K*": Sup(i, star(k)),
                "(IuK)*": union_star(i, k),
            }
        )
    return modes


def _member_sample(i: Ideal) -> list[EpSet]:
    """Sample of members of ``I``: empty, each generator, the generator union."""
    out = [EpSet.empty(i.domain)]
    for gset in i.generators:
        if gset not in out:
            out.append(gset)
    if i.grand_union not in out:
        out.append(i.grand_union)
    return out


def verify_section2(
    bounds: "catalog.Bounds | None" = None,
    *,
    decide_fn=None,
    require_ideality: bool = True,
) -> Report:
    """Mode-relation battery over a finite battery and an omega battery.

    With the library evaluator, instances are grouped by the bad set of
    the minimal neighbourhood (every fast-path verdict is a function of
    it) and counted with multiplicity.  A custom ``decide_fn``
    (``(f, x, mode, space) -> Verdict``) is evaluated instance by
    instance; together with ``require_ideality=False`` it serves
    mutation runs.
    """
    bounds = (bounds or catalog.Bounds()).resolved("s2")
    report = Report("s2", bounds.to_json())
    for battery in catalog.section2_batteries(bounds):
        if decide_fn is None:
            classes = _bad_classes(battery.spaces, battery.functions)
        else:
            classes = _instance_classes(battery.spaces, battery.functions)
        for i, k in battery.pairs:
            if require_ideality and not is_proper(join(i, k)):
                continue
            i, k = _named(i, "I"), _named(k, "K")
            _section2_pair(report, classes, i, k, battery.js, decide_fn)
            for space in battery.spaces:
                if len(space.opens) == 1 << space.size:
                    for f in battery.functions(space):
                        _discrete_limits(report, space, f, i, k, decide_fn or decide)
    return report


def _bad_classes(spaces, functions) -> list[list]:
    """``[weight, space, f, x]`` per distinct minimal-neighbourhood bad set."""
    classes: dict[EpSet, list] = {}
    for space in spaces:
        for f in functions(space):
            for x in range(space.size):
                bad = bad_set(f, space.min_nbhd[x])
                entry = classes.get(bad)
                if entry is None:
                    classes[bad] = [1, space, f, x]
                else:
                    entry[0] += 1
    return list(classes.values())


def _instance_classes(spaces, functions) -> list[list]:
    return [[1, space, f, x] for space in spaces for f in functions(space) for x in range(space.size)]


def _section2_pair(report, classes, i, k, js, decide_fn) -> None:
    modes = _pair_modes(i, k, js)
    k_in_i, i_in_k = is_subideal(k, i), is_subideal(i, k)
    degenerate = not is_proper(join(i, k))
    extended_k = [Base(extend_by_member(k, jset)) for jset in _member_sample(i)]
    omega = i.domain == OMEGA
    ik_witness = complement(i.grand_union)
    named = {"I": i, "K": k, **{f"J{idx}": j for idx, j in enumerate(js)}}

    for weight, space, f, x in classes:
        if decide_fn is None:
            bad = bad_set(f, space.min_nbhd[x])
            conv = {name: converges_bad(bad, m) for name, m in modes.items()}
            extended_conv = [converges_bad(bad, jm) for jm in extended_k]
        else:
            conv = {name: decide_fn(f, x, m, space).converges for name, m in modes.items()}
            extended_conv = [decide_fn(f, x, jm, space).converges for jm in extended_k]
        report.instances += weight
        report.degenerate += weight * degenerate

        def rec(name: str, ok: bool, mode: str = "I^K") -> None:
            report.check(name).record(
                ok, lambda: catalog.instance_spec(space, named, f, x, mode), weight
            )

        def implies(name: str, a: str, b: str) -> None:
            rec(name, (not conv[a]) or conv[b], a)

        implies("I^K => IuK", "I^K", "IuK")
        implies("K => I^K", "K", "I^K")
        if k_in_i:
            implies("I^K => I when K in I", "I^K", "I")
        if i_in_k:
            implies("I^K => K when I in K", "I^K", "K")
        implies("diagram: I^K -> IuK", "I^K", "IuK")
        for idx in range(len(js)):
            implies("diagram: I^K -> I^(K^J)", "I^K", f"I^(K^J{idx})")
        if omega:
            rec("I^K* <=> (IuK)*", conv["I^K*"] == conv["(IuK)*"], "I^K*")
            implies("I^K* => I", "I^K*", "I")
            implies("I^K* => K", "I^K*", "K")
            implies("diagram: I* -> I^K", "I*", "I^K")
            implies("diagram: I* -> (IuK)*", "I*", "(IuK)*")
            implies("diagram: (IuK)* == I^K*", "(IuK)*", "I^K*")
            for idx in range(len(js)):
                implies("diagram: I^K* -> I^(K^J)", "I^K*", f"I^(K^J{idx})")
        for jconv in extended_conv:
            rec("J-convergence => I^K when J adds I-positive set to K", (not jconv) or conv["I^K"])
        if conv["I^K"]:
            rec("witness in dual filter of I", contains(i, complement(ik_witness)))



def _discrete_limits(report, space, f, i, k, fn) -> None:
    ik = Sup(i, Base(k))
    verdicts = [fn(f, x, ik, space) for x in range(space.size)]
    limits = [x for x, v in enumerate(verdicts) if v.converges]

    def ex(x):
        return lambda: catalog.instance_spec(space, {"I": i, "K": k}, f, x, "I^K")

    report.check("I^K limit unique (discrete, proper join)").record(len(limits) <= 1, ex(limits[-1] if limits else 0))
    for x0 in limits:
        # an evaluator that reports no witness gets the canonical one
        w = verdicts[x0].witnesses[0] if verdicts[x0].witnesses else complement(i.grand_union)
        jj = Base(extend_by_member(k, complement(w)))
        for y in range(space.size):
            same = verdicts[y].converges == fn(f, y, jj, space).converges
            report.check("I^K limit <=> J limit (discrete)").record(same, ex(y))
