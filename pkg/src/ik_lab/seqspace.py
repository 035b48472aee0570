"""I^K-open sets and I^K-sequential spaces.

``O`` is mode-open when no sequence valued in ``X \\ O`` converges (in
the mode) to a point of ``O``.  Two evaluators:

* characterization: with a proper effective ideal, mode-open iff no
  point of ``O`` has a minimal neighbourhood leaving ``O`` (i.e. ``O``
  open); with an improper one every sequence converges everywhere, so
  only ``{}`` and ``X`` qualify;
* bounded search: every periodic word over ``X \\ O`` of period at most
  ``|X|`` (omega), or every function ``[0, n) -> X \\ O`` (Finite(n)).

The search is complete because convergence only looks at the bad set of
the minimal neighbourhood, and a constant sequence at a point of
``minN(x) \\ O`` already converges to ``x``.  Both run by default and a
disagreement raises :class:`MethodDisagreement`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Callable, Iterable

from . import catalog, kernels
from .convergence import (
    Base,
    FunctionSeq,
    Mode,
    Sup,
    _bad_classes,
    bad_set,
    converges_bad,
    decide,
    effective_ideal,
    mode_domain,
    modify_on_set,
)
from .ideals import FIN, Ideal, ideality_condition, is_proper, is_subideal
from .indexsets import OMEGA, EpSet
from .report import Report
from .topology import (
    FiniteSpace,
    closure,
    disjoint_sum,
    is_continuous,
    is_discrete,
    is_open_set,
    quotient,
    subspace,
)

__all__ = [
    "CHARACTERIZATION",
    "BOUNDED_SEARCH",
    "MethodDisagreement",
    "OpennessVerdict",
    "is_mode_open",
    "is_mode_closed",
    "is_sequential",
    "mode_open_family",
    "verify_section3",
]

CHARACTERIZATION = "characterization"
BOUNDED_SEARCH = "bounded-search"
_MAX_FINITE_N = 12
_PROPER = "pairs with a proper join; improper joins are covered by the failing-ideality checks"


class MethodDisagreement(AssertionError):
    """Characterization and bounded search gave different answers."""


@dataclass(frozen=True)
class OpennessVerdict:
    is_mode_open: bool
    counterexample: tuple[FunctionSeq, int] | None = None
    method: str = CHARACTERIZATION

    def to_json(self, space: FiniteSpace) -> dict:
        out = {"mode_open": self.is_mode_open, "method": self.method}
        if self.counterexample is not None:
            f, x = self.counterexample
            out["counterexample"] = {"function": f.to_json(space.points), "limit": space.points[x]}
        return out


def _as_mode(i_or_mode, k: Ideal | None) -> Mode:
    if isinstance(i_or_mode, (Base, Sup)):
        return i_or_mode
    if k is None:
        raise TypeError("pass a mode, or both ideals I and K")
    return Sup(i_or_mode, Base(k))


@lru_cache(maxsize=1024)
def _table(m: Mode, lengths: tuple[int, ...]) -> bytes:
    """Convergence verdict for every bad residue pattern of each word length."""
    dom = mode_domain(m)
    out = bytearray()
    for length in lengths:
        for r in range(1 << length):
            bad = EpSet.from_mask(dom, r) if dom != OMEGA else EpSet.raw_omega(0, 0, length, r)
            out.append(converges_bad(bad, m))
    return bytes(out)


def _lengths(m: Mode, space: FiniteSpace) -> tuple[int, ...]:
    dom = mode_domain(m)
    if dom == OMEGA:
        return tuple(range(1, space.size + 1))
    if dom.n > _MAX_FINITE_N:
        raise ValueError(f"bounded search supports Finite(n) with n <= {_MAX_FINITE_N}")
    return (dom.n,)


def _word(m: Mode, vals: tuple[int, ...]) -> FunctionSeq:
    if mode_domain(m) == OMEGA:
        return FunctionSeq.periodic(vals)
    return FunctionSeq.finite(vals)


def _search(space: FiniteSpace, o: int, m: Mode) -> OpennessVerdict:
    lengths = _lengths(m, space)
    hit = kernels.mode_open_search(space.min_nbhd, space.size, o, lengths, _table(m, lengths))
    if hit is None:
        return OpennessVerdict(True, method=BOUNDED_SEARCH)
    _, vals, x = hit
    return OpennessVerdict(False, (_word(m, vals), x), BOUNDED_SEARCH)


def _characterize(space: FiniteSpace, o: int, m: Mode) -> OpennessVerdict:
    outside = space.full & ~o
    if is_proper(effective_ideal(m)):
        for x in range(space.size):
            leak = space.min_nbhd[x] & outside
            if (o >> x) & 1 and leak:
                y = (leak & -leak).bit_length() - 1
                return OpennessVerdict(False, (_constant(m, y), x))
        return OpennessVerdict(True)
    if o == 0 or outside == 0:
        return OpennessVerdict(True)
    x = (o & -o).bit_length() - 1
    y = (outside & -outside).bit_length() - 1
    return OpennessVerdict(False, (_constant(m, y), x))


def _constant(m: Mode, y: int) -> FunctionSeq:
    return FunctionSeq.constant(mode_domain(m), y)


def _replays(space: FiniteSpace, o: int, m: Mode, verdict: OpennessVerdict) -> bool:
    f, x = verdict.counterexample
    inside = any((o >> v) & 1 for v in f.values_used())
    return not inside and (o >> x) & 1 and decide(f, x, m, space).converges


def is_mode_open(
    space: FiniteSpace,
    o: int,
    i: Ideal | Mode,
    k: Ideal | None = None,
    *,
    method: str = "both",
) -> OpennessVerdict:
    """Is the point mask ``o`` open for the mode (``I^K`` when given two ideals)?"""
    if o & ~space.full:
        raise ValueError("set is not a subset of the space")
    m = _as_mode(i, k)
    if method == CHARACTERIZATION:
        return _characterize(space, o, m)
    if method == BOUNDED_SEARCH:
        return _search(space, o, m)
    if method != "both":
        raise ValueError(f"unknown method {method!r}")
    fast, slow = _characterize(space, o, m), _search(space, o, m)
    if fast.is_mode_open != slow.is_mode_open:
        raise MethodDisagreement(
            f"{space.to_labels(o)}: characterization says {fast.is_mode_open}, search says {slow.is_mode_open}"
        )
    for v in (fast, slow):
        if v.counterexample is not None and not _replays(space, o, m, v):
            raise MethodDisagreement(f"counterexample for {space.to_labels(o)} does not replay")
    return slow


def is_mode_closed(space: FiniteSpace, a: int, i: Ideal | Mode, k: Ideal | None = None, **kw) -> bool:
    return is_mode_open(space, space.full & ~a, i, k, **kw).is_mode_open


def mode_open_family(space: FiniteSpace, i: Ideal | Mode, k: Ideal | None = None, **kw) -> list[int]:
    return [o for o in range(space.full + 1) if is_mode_open(space, o, i, k, **kw).is_mode_open]


def is_sequential(space: FiniteSpace, i: Ideal | Mode, k: Ideal | None = None, **kw) -> bool:
    """Every mode-open subset is open."""
    return all(is_open_set(space, o) for o in mode_open_family(space, i, k, **kw))


# ---------------------------------------------------------------------------
# section battery


def _classes(pairs: Iterable[tuple[Ideal, Ideal]], lengths) -> dict[bytes, list]:
    """Ideal pairs grouped by their convergence table (openness depends on nothing else)."""
    out: dict[bytes, list] = {}
    for i, k in pairs:
        out.setdefault(_table(Sup(i, Base(k)), lengths), []).append((i, k))
    return out


class _Families:
    """Mode-open families cached by (space, convergence table), both methods cross-checked."""

    def __init__(self, report: Report, hook: Callable[[FiniteSpace], FiniteSpace] | None):
        self.report = report
        self.hook = hook
        self.memo: dict = {}

    def __call__(self, space: FiniteSpace, m: Mode) -> frozenset[int]:
        lengths = _lengths(m, space)
        key = (space.points, space.opens, _table(m, lengths))
        fam = self.memo.get(key)
        if fam is None:
            probe = self.hook(space) if self.hook else space
            agree = self.report.check("characterization == bounded search")
            replay = self.report.check("counterexamples replay")
            members = []
            for o in range(space.full + 1):
                fast, slow = _characterize(probe, o, m), _search(probe, o, m)
                agree.record(fast.is_mode_open == slow.is_mode_open, lambda: _ex(space, m, o))
                if slow.counterexample is not None:
                    replay.record(_replays(probe, o, m, slow), lambda: _ex(space, m, o))
                if slow.is_mode_open:
                    members.append(o)
            fam = self.memo[key] = frozenset(members)
        return fam


def _ex(space: FiniteSpace, m: Mode, o: int, **extra) -> dict:
    ideals = {"I": m.ideal.to_json(), "K": m.inner.ideal.to_json()} if isinstance(m, Sup) else {}
    return {"space": space.to_json(), "ideals": ideals, "set": space.to_labels(o), **extra}


def _partitions(k: int) -> Iterable[list[int]]:
    """Block labels (restricted growth strings) for every partition of ``range(k)``."""

    def grow(prefix: list[int], top: int):
        if len(prefix) == k:
            yield list(prefix)
            return
        for b in range(top + 2):
            yield from grow(prefix + [b], max(top, b))

    if k:
        yield from grow([0], 0)


def verify_section3(
    bounds: catalog.Bounds | None = None,
    *,
    space_hook: Callable[[FiniteSpace], FiniteSpace] | None = None,
) -> Report:
    """Openness/sequentiality battery.  ``space_hook`` replaces the space
    handed to both openness evaluators (mutation testing); the topology
    checks themselves read the open-set family directly."""
    bounds = (bounds or catalog.Bounds()).resolved("s3")
    report = Report("s3", bounds.to_json())
    families = _Families(report, space_hook)
    spaces = catalog.spaces_upto(bounds.k)
    ideals = catalog.omega_ideals(bounds.p)
    pairs = catalog.omega_pairs(bounds.p)

    for space in spaces:
        classes = _classes(pairs, _lengths(Sup(FIN, Base(FIN)), space))
        for table, members in classes.items():
            i, k = members[0]
            m = Sup(i, Base(k))
            w = len(members)
            proper = is_proper(effective_ideal(m))
            fam = families(space, m)
            report.instances += w
            report.degenerate += w * (not proper)
            _family_checks(report, space, m, fam, proper, w)
            if proper and is_discrete(space):
                ok = fam == frozenset(space.opens)
                report.check("discrete: open <=> mode-open").record(ok, lambda: _ex(space, m, 0), w)
            for o in range(space.full + 1):
                sub_open = o in fam
                sub_closed = (space.full & ~o) in fam
                if o and (sub_open or sub_closed):
                    sub = subspace(space, o)
                    ok = families(sub, m) <= frozenset(sub.opens)
                    name = "mode-open subspace sequential" if sub_open else "mode-closed subspace sequential"
                    report.check(name).record(ok, lambda: _ex(space, m, o), w)
                    if sub_open and sub_closed:
                        report.check("mode-closed subspace sequential").record(ok, lambda: _ex(space, m, o), w)
        for a in range(space.full + 1):
            pts = closure_union(space, a)
            report.check("closure(A) == union of point closures").record(
                closure(space, a) == pts, lambda: {"space": space.to_json(), "set": space.to_labels(a)}
            )

    _monotonicity(report, families, spaces, ideals)
    _quotients(report, families, spaces, pairs, bounds)
    _sums(report, families, spaces, pairs, bounds)
    _modification(report, spaces, ideals, bounds)
    _degeneracy(report, families, bounds)
    return report


def closure_union(space: FiniteSpace, a: int) -> int:
    out = 0
    for x in range(space.size):
        if (a >> x) & 1:
            out |= closure(space, 1 << x)
    return out


def _family_checks(report, space, m, fam, proper, w) -> None:
    opens = frozenset(space.opens)
    if proper:
        report.check("open => mode-open", note=_PROPER).record(
            opens <= fam, lambda: _ex(space, m, min(opens - fam)), w
        )
    report.check("empty set and X mode-open").record(0 in fam and space.full in fam, lambda: _ex(space, m, 0), w)
    union_ok = all((u | v) in fam for u, v in combinations(sorted(fam), 2))
    report.check("union of mode-opens is mode-open").record(union_ok, lambda: _ex(space, m, 0), w)
    report.check("mode-open => open (sequential space)").record(
        fam <= opens, lambda: _ex(space, m, min(fam - opens)), w
    )


def _monotonicity(report, families, spaces, ideals) -> None:
    """Larger ideals converge more, so they can only shrink the mode-open family."""
    chk_i = report.check("monotone in I: I1 in I2 => open(I2,K) in open(I1,K)")
    chk_k = report.check("monotone in K: K1 in K2 => open(I,K2) in open(I,K1)")
    subs = [(a, b) for a in ideals for b in ideals if a is not b and is_subideal(a, b)]
    for space in spaces:
        for small, big in subs:
            for other in ideals:
                fi_small = families(space, Sup(small, Base(other)))
                fi_big = families(space, Sup(big, Base(other)))
                chk_i.record(fi_big <= fi_small, lambda: _ex(space, Sup(big, Base(other)), 0))
                fk_small = families(space, Sup(other, Base(small)))
                fk_big = families(space, Sup(other, Base(big)))
                chk_k.record(fk_big <= fk_small, lambda: _ex(space, Sup(other, Base(big)), 0))


def _quotients(report, families, spaces, pairs, bounds) -> None:
    seq = report.check("quotient of sequential space is sequential")
    cont = report.check("continuous map preserves I^K limits")
    functions_by_size = {}
    for space in spaces:
        classes = _classes(pairs, _lengths(Sup(FIN, Base(FIN)), space))
        for labels in _partitions(space.size):
            blocks = [[space.points[x] for x in range(space.size) if labels[x] == b] for b in range(max(labels) + 1)]
            q, qmap = quotient(space, blocks)
            if not is_continuous(qmap):
                cont.record(False, {"space": space.to_json(), "partition": blocks})
                continue
            for table, members in classes.items():
                i, k = members[0]
                m = Sup(i, Base(k))
                ok = families(q, m) <= frozenset(q.opens)
                seq.record(ok, lambda: {**_ex(q, m, 0), "from": space.to_json()}, len(members))
                if space.size <= 3:
                    fs = functions_by_size.setdefault(
                        space.size, catalog.omega_functions(space.size, bounds.p, 8)
                    )
                    for f in fs:
                        g = f.map(lambda v: qmap.assignment[v])
                        for x in range(space.size):
                            if converges_bad(bad_set(f, space.min_nbhd[x]), m):
                                y = qmap.assignment[x]
                                cont.record(
                                    converges_bad(bad_set(g, q.min_nbhd[y]), m),
                                    lambda: {**_ex(space, m, 0), "partition": blocks},
                                    len(members),
                                )


def _sums(report, families, spaces, pairs, bounds) -> None:
    seq = report.check("disjoint sum sequential")
    local = report.check("sum: mode-open iff every piece mode-open", note=_PROPER)
    small = [sp for sp in spaces if sp.size < bounds.k]
    for a in small:
        for b in small:
            if a.size + b.size > bounds.k:
                continue
            s = disjoint_sum([a, b])
            classes = _classes(pairs, _lengths(Sup(FIN, Base(FIN)), s))
            for table, members in classes.items():
                i, k = members[0]
                m = Sup(i, Base(k))
                w = len(members)
                fam = families(s, m)
                proper = is_proper(effective_ideal(m))
                seq.record(fam <= frozenset(s.opens), lambda: _ex(s, m, 0), w)
                fa, fb = families(a, m), families(b, m)
                low = (1 << a.size) - 1
                ok = all(((o in fam) == ((o & low) in fa and (o >> a.size) in fb)) for o in range(s.full + 1))
                if proper:
                    local.record(ok, lambda: _ex(s, m, 0), w)


def _modification(report, spaces, ideals, bounds) -> None:
    """Changing f on a member of I leaves I-convergence untouched."""
    chk = report.check("modifying on a member of I keeps I-verdicts")
    for space in spaces:
        if space.size > 3:
            continue
        fs = catalog.omega_functions(space.size, bounds.p, 8)
        for ideal in ideals:
            members = list(ideal.generators) + [EpSet.raw_omega(0b11, 2, 1, 0)]
            for f in fs:
                for a in members:
                    for y in range(space.size):
                        g = modify_on_set(f, a, FunctionSeq.constant(OMEGA, y))
                        for x in range(space.size):
                            mn = space.min_nbhd[x]
                            ok = converges_bad(bad_set(f, mn), Base(ideal)) == converges_bad(bad_set(g, mn), Base(ideal))
                            chk.record(
                                ok,
                                lambda: catalog.instance_spec(space, {"I": ideal}, f, x, "I", modified_on=a.to_json()),
                            )


def _degeneracy(report, families, bounds) -> None:
    """Pairs failing ideality (finite battery): everything converges everywhere,
    and only the trivial sets are mode-open."""
    n = bounds.n
    spaces = catalog.spaces_upto(bounds.k)
    bad_pairs = [(i, k) for i, k in catalog.finite_pairs(n) if not ideality_condition(i, k)]
    conv = report.check("failing ideality: every f converges to every x")
    opens = report.check("failing ideality: mode-opens are exactly {}, X")
    if not bad_pairs:
        return
    classes = _bad_classes(spaces, lambda sp: catalog.finite_functions(sp.size, n))
    for i, k in bad_pairs:
        m = Sup(i, Base(k))
        for weight, space, f, x in classes:
            conv.record(
                decide(f, x, m, space).converges,
                lambda: catalog.instance_spec(space, {"I": i, "K": k}, f, x, "I^K"),
                weight,
            )
        for space in spaces:
            fam = families(space, m)
            opens.record(fam == frozenset({0, space.full}), lambda: _ex(space, m, 0))
