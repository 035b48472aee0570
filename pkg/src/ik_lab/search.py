"""Counterexample/witness search over the enumerated batteries.

Predicates (the fixed menu)::

    converges-in(M1)-not-in(M2)[-not-in(M3)...]
    cluster-set-differs(SEM_A,SEM_B)
    non-unique-limit
    ideality-fails
    j-equivalence-fails

Mode strings may mention ``I``, ``K`` and ``J``.  Finite batteries run
domains ``Finite(1) .. Finite(n)`` in increasing size so the smallest
instance comes first; a mode with ``*`` switches to the omega battery.
Each hit is a dict ``{"config": <replayable config>, "observed": ...}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from . import catalog
from .convergence import Base, Sup, bad_set, converges_bad, limit_set, parse_mode
from .ideals import Ideal, enumerate_ideals_finite, generated, ideality_condition, is_proper, join
from .indexsets import EpSet, Finite
from .points import Semantics, cluster_points
from .topology import FiniteSpace, is_discrete

__all__ = ["PredicateError", "Predicate", "parse_predicate", "run_search", "SPACE_FILTERS"]

SPACE_FILTERS = ("all", "discrete", "non-discrete")


class PredicateError(ValueError):
    pass


@dataclass(frozen=True)
class Predicate:
    kind: str
    modes: tuple[str, ...] = ()
    semantics: tuple[Semantics, ...] = ()

    def __str__(self) -> str:
        if self.kind == "converges-in":
            return f"converges-in({self.modes[0]})" + "".join(f"-not-in({m})" for m in self.modes[1:])
        if self.kind == "cluster-set-differs":
            return f"cluster-set-differs({self.semantics[0].value},{self.semantics[1].value})"
        return self.kind


def _group(text: str, pos: int) -> tuple[str, int]:
    """Balanced ``( ... )`` starting at ``pos``; returns (inner, end)."""
    if pos >= len(text) or text[pos] != "(":
        raise PredicateError(f"expected '(' at column {pos + 1} of {text!r}")
    depth = 0
    for j in range(pos, len(text)):
        depth += {"(": 1, ")": -1}.get(text[j], 0)
        if depth == 0:
            return text[pos + 1 : j], j + 1
    raise PredicateError(f"unbalanced parentheses in {text!r}")


def parse_predicate(text: str) -> Predicate:
    text = text.strip()
    if text in ("non-unique-limit", "ideality-fails", "j-equivalence-fails"):
        return Predicate(text)
    if text.startswith("converges-in"):
        first, pos = _group(text, len("converges-in"))
        modes = [first]
        while pos < len(text):
            if not text.startswith("-not-in", pos):
                raise PredicateError(f"expected '-not-in(...)' at column {pos + 1} of {text!r}")
            m, pos = _group(text, pos + len("-not-in"))
            modes.append(m)
        if len(modes) < 2:
            raise PredicateError("converges-in(...) needs at least one -not-in(...)")
        return Predicate("converges-in", tuple(modes))
    if text.startswith("cluster-set-differs"):
        inner, pos = _group(text, len("cluster-set-differs"))
        parts = [p.strip() for p in inner.split(",")]
        if pos != len(text) or len(parts) != 2:
            raise PredicateError("cluster-set-differs takes two semantics, e.g. (padded,trace)")
        try:
            sems = tuple(Semantics(p) for p in parts)
        except ValueError:
            raise PredicateError(f"semantics are 'trace' or 'padded', got {inner!r}") from None
        return Predicate("cluster-set-differs", semantics=sems)
    raise PredicateError(
        f"unknown predicate {text!r}; choose converges-in(M)-not-in(M2), cluster-set-differs(A,B), "
        "non-unique-limit, ideality-fails, j-equivalence-fails"
    )


def _spaces(bounds: catalog.Bounds, which: str) -> list[FiniteSpace]:
    if which not in SPACE_FILTERS:
        raise PredicateError(f"space filter must be one of {SPACE_FILTERS}")
    out = []
    # coarsest first within each size, so Sierpinski-type spaces precede discrete ones
    for sp in sorted(catalog.spaces_upto(bounds.k), key=lambda sp: (sp.size, len(sp.opens))):
        if which == "discrete" and not is_discrete(sp):
            continue
        if which == "non-discrete" and is_discrete(sp):
            continue
        out.append(sp)
    return out


def _finite_batteries(bounds: catalog.Bounds, ideality: bool | None = True):
    """(pairs, J, functions-by-space) per finite domain size, smallest first.
    ``ideality`` keeps pairs where the condition holds / fails; ``None`` keeps all."""
    for n in range(1, bounds.n + 1):
        pairs = [
            (i, k) for i, k in catalog.finite_pairs(n) if ideality is None or ideality_condition(i, k) == ideality
        ]
        j = generated(Finite(n), EpSet.finite(n, [n - 1]), name="J")
        yield pairs, j, (lambda sp, n=n: catalog.finite_functions(sp.size, n))


def _omega_battery(bounds: catalog.Bounds):
    pairs = [(i, k) for i, k in catalog.omega_pairs(bounds.p) if ideality_condition(i, k)]
    j = next(i for i in catalog.omega_ideals(bounds.p) if not i.generators)
    for cand in catalog.omega_ideals(bounds.p):
        if cand.name == "gen(0 mod 3)":
            j = cand
    yield pairs, j, (lambda sp: catalog.omega_functions(sp.size, bounds.p, bounds.f))


def _named(i: Ideal, k: Ideal, j: Ideal | None = None) -> dict[str, Ideal]:
    out = {"I": i, "K": k}
    if j is not None:
        out["J"] = j
    return out


def run_search(pred: Predicate, bounds: catalog.Bounds | None = None, spaces: str = "all") -> Iterator[dict]:
    bounds = (bounds or catalog.Bounds()).resolved("search")
    sps = _spaces(bounds, spaces)
    if pred.kind == "converges-in":
        yield from _converges_in(pred, bounds, sps)
    elif pred.kind == "cluster-set-differs":
        yield from _cluster_differs(pred, bounds, sps)
    elif pred.kind == "non-unique-limit":
        yield from _non_unique(bounds, sps)
    elif pred.kind == "ideality-fails":
        yield from _ideality_fails(bounds, sps)
    elif pred.kind == "j-equivalence-fails":
        yield from _j_equivalence(bounds, sps)


def _converges_in(pred, bounds, sps):
    omega = any("*" in m for m in pred.modes)
    batteries = _omega_battery(bounds) if omega else _finite_batteries(bounds)
    for pairs, j, functions in batteries:
        for i, k in pairs:
            named = _named(i, k, j)
            try:
                modes = [parse_mode(m, named) for m in pred.modes]
            except ValueError as exc:
                raise PredicateError(str(exc)) from None
            for space in sps:
                for f in functions(space):
                    for x in range(space.size):
                        bad = bad_set(f, space.min_nbhd[x])
                        if converges_bad(bad, modes[0]) and not any(converges_bad(bad, m) for m in modes[1:]):
                            yield {
                                "config": catalog.instance_spec(space, named, f, x, pred.modes[0]),
                                "observed": {"converges": {m: m == pred.modes[0] for m in pred.modes}},
                            }


def _cluster_differs(pred, bounds, sps):
    sa, sb = pred.semantics
    for pairs, _, functions in _finite_batteries(bounds, ideality=None):
        for space in sps:
            for i, k in pairs:
                for f in functions(space):
                    ca = cluster_points(f, i, k, space, sa)
                    cb = cluster_points(f, i, k, space, sb)
                    if ca != cb:
                        yield {
                            "config": catalog.instance_spec(space, _named(i, k), f, None),
                            "observed": {sa.value: space.to_labels(ca), sb.value: space.to_labels(cb)},
                        }


def _non_unique(bounds, sps):
    for pairs, _, functions in _finite_batteries(bounds):
        for i, k in pairs:
            m = Sup(i, Base(k))
            for space in sps:
                for f in functions(space):
                    lim = limit_set(f, m, space)
                    if lim & (lim - 1):
                        yield {
                            "config": catalog.instance_spec(space, _named(i, k), f, None, "I^K"),
                            "observed": {"limits": space.to_labels(lim)},
                        }


def _ideality_fails(bounds, sps):
    """Pairs whose join is improper, each with a constant sequence converging to a point it never visits."""
    targets = [sp for sp in sps if sp.size >= 2]
    if not targets:
        return
    space = targets[0]
    for pairs, _, _ in _finite_batteries(bounds, ideality=False):
        for i, k in pairs:
            f = catalog.finite_functions(space.size, i.domain.n)[-1]  # constant at the last point
            yield {
                "config": catalog.instance_spec(space, _named(i, k), f, 0, "I^K"),
                "observed": {"join_proper": is_proper(join(i, k)), "converges": True},
            }


def _j_equivalence(bounds, sps):
    """Pairs for which no single ideal on the domain reproduces I^K-convergence
    (over every function and point of the space)."""
    for pairs, _, functions in _finite_batteries(bounds):
        n = pairs[0][0].domain.n if pairs else None
        if n is None:
            continue
        candidates = list(enumerate_ideals_finite(n))
        for space in sps:
            bads = {bad_set(f, space.min_nbhd[x]) for f in functions(space) for x in range(space.size)}
            for i, k in pairs:
                target = {b: converges_bad(b, Sup(i, Base(k))) for b in bads}
                if not any(all(converges_bad(b, Base(c)) == v for b, v in target.items()) for c in candidates):
                    yield {
                        "config": catalog.instance_spec(space, _named(i, k), functions(space)[0], None, "I^K"),
                        "observed": {"candidates_tried": len(candidates)},
                    }

