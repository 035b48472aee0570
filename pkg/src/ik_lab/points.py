"""I^K-cluster points and I^K-limit points.

Two readings of the cluster-point definition are implemented:

``TRACE``
    x is a cluster point when some witness ``M`` in the dual filter of
    ``I`` has ``{s in M : f(s) in U}`` K-positive for every
    neighbourhood ``U`` of x.  ``M = omega`` is always allowed, so the
    set equals the K-cluster set of ``f``.
``PADDED``
    The literal reading: pad ``f`` with ``x`` off ``M`` and ask that
    ``{s : g(s) in U}`` be K-positive.  The padding itself lands in
    ``U``, so as soon as some member of ``I`` is K-positive every point
    qualifies; otherwise the set is again the K-cluster set.

Limit points coincide with cluster points on finite spaces: restrict to
``N = {s : g(s) in minimal nbhd}``.
"""

from __future__ import annotations

import enum
from math import lcm
from typing import Sequence

from . import catalog
from .convergence import FunctionSeq, _witness_candidates, hit_set, modify_on_set, bad_set
from .ideals import (
    FIN,
    Ideal,
    ImproperIdealError,
    contains,
    ideality_condition,
    is_positive,
    is_proper,
    is_subideal,
    join,
)
from .indexsets import OMEGA, DomainError, EpSet, complement, intersect, is_finite_set, union
from .report import Report
from .topology import FiniteSpace, closure, is_closed_set

__all__ = [
    "Semantics",
    "RealizationError",
    "cluster_points",
    "cluster_points_search",
    "base_cluster_points",
    "limit_points",
    "limit_points_search",
    "realize_cluster_set",
    "admissible_partition",
    "verify_section4",
    "verify_padded_closed_form",
]


class Semantics(enum.Enum):
    TRACE = "trace"
    PADDED = "padded"


class RealizationError(ValueError):
    pass


def _require_proper(*ideals: Ideal) -> None:
    for ideal in ideals:
        if not is_proper(ideal):
            raise ImproperIdealError(f"{ideal} is improper")


def base_cluster_points(f: FunctionSeq, ideal: Ideal, space: FiniteSpace) -> int:
    """Cluster set for a single ideal: ``{x : {s : f(s) in minN(x)}`` is positive}."""
    return sum(
        1 << x for x in range(space.size) if is_positive(ideal, hit_set(f, space.min_nbhd[x]))
    )


def cluster_points(
    f: FunctionSeq, i: Ideal, k: Ideal, space: FiniteSpace, semantics: Semantics = Semantics.TRACE
) -> int:
    """Mask of I^K-cluster points (closed form)."""
    _require_proper(i, k)
    if semantics is Semantics.PADDED and not is_subideal(i, k):
        return space.full
    return base_cluster_points(f, k, space)


def cluster_points_search(
    f: FunctionSeq,
    i: Ideal,
    k: Ideal,
    space: FiniteSpace,
    semantics: Semantics = Semantics.TRACE,
    *,
    head_window: int = 0,
) -> int:
    """Definition-faithful cluster set: witness search, every open tested."""
    _require_proper(i, k)
    out = 0
    for x in range(space.size):
        const = FunctionSeq.constant(f.domain, x)
        for m in _witness_candidates(i, head_window):
            if semantics is Semantics.PADDED:
                g = modify_on_set(f, complement(m), const)
                sets = (hit_set(g, u) for u in space.opens_containing(x))
            else:
                sets = (intersect(hit_set(f, u), m) for u in space.opens_containing(x))
            if all(is_positive(k, a) for a in sets):
                out |= 1 << x
                break
    return out


def limit_points(
    f: FunctionSeq, i: Ideal, k: Ideal, space: FiniteSpace, semantics: Semantics = Semantics.TRACE
) -> int:
    """Mask of I^K-limit points; omega only (sub-restrictions must be Fin-convergent)."""
    if f.domain != OMEGA:
        raise DomainError("limit points need omega-indexed functions")
    return cluster_points(f, i, k, space, semantics)


def _instance_modulus(f: FunctionSeq, *ideals: Ideal) -> int:
    p = f.p
    for ideal in ideals:
        for g in ideal.generators:
            p = lcm(p, g.p)
    return p


def limit_points_search(
    f: FunctionSeq,
    i: Ideal,
    k: Ideal,
    space: FiniteSpace,
    semantics: Semantics = Semantics.TRACE,
    *,
    max_modulus: int = 12,
) -> int:
    """Limit points by direct search over witnesses ``M`` and sets ``N``.

    ``N`` ranges over unions of residue classes modulo the instance lcm;
    x qualifies when some ``N`` is K-positive and the (padded or
    restricted) function converges to x along ``N`` in the ordinary
    sense, i.e. leaves each neighbourhood of x only finitely often on it.
    """
    if f.domain != OMEGA:
        raise DomainError("limit points need omega-indexed functions")
    _require_proper(i, k)
    modulus = _instance_modulus(f, i, k)
    if modulus > max_modulus:
        raise ValueError(f"instance modulus {modulus} exceeds search bound {max_modulus}")
    ns = [EpSet.raw_omega(0, 0, modulus, mask) for mask in range(1, 1 << modulus)]
    out = 0
    for x in range(space.size):
        const = FunctionSeq.constant(OMEGA, x)
        nbhds = space.opens_containing(x)
        found = False
        for m in _witness_candidates(i, 0):
            if semantics is Semantics.PADDED:
                g, domain_sets = modify_on_set(f, complement(m), const), ns
            else:
                g, domain_sets = f, [intersect(n, m) for n in ns]
            bads = [bad_set(g, u) for u in nbhds]
            for n in domain_sets:
                if is_positive(k, n) and all(is_finite_set(intersect(n, b)) for b in bads):
                    found = True
                    break
            if found:
                break
        if found:
            out |= 1 << x
    return out


def admissible_partition(m: int, parts: int, i: Ideal, k: Ideal) -> list[list[int]] | None:
    """Split the residues mod ``m`` into ``parts`` classes, each positive for both ideals.

    A class is I-positive iff one of its residues is, so this reduces to
    picking ``parts`` disjoint cores: a residue positive for both, or an
    I-positive residue paired with a K-positive one.  Leftover residues
    join the first class.  Returns ``None`` when no split exists.
    """
    pos_i = [is_positive(i, EpSet.periodic(m, [r])) for r in range(m)]
    pos_k = [is_positive(k, EpSet.periodic(m, [r])) for r in range(m)]
    both = [r for r in range(m) if pos_i[r] and pos_k[r]]
    only_i = [r for r in range(m) if pos_i[r] and not pos_k[r]]
    only_k = [r for r in range(m) if pos_k[r] and not pos_i[r]]
    cores = [[r] for r in both] + [[a, b] for a, b in zip(only_i, only_k)]
    if len(cores) < parts:
        return None
    classes = cores[:parts]
    used = {r for c in classes for r in c}
    classes[0] = sorted(classes[0] + [r for r in range(m) if r not in used])
    return classes


def realize_cluster_set(
    space: FiniteSpace, target: int, i: Ideal = FIN, k: Ideal = FIN, *, max_modulus: int | None = None
) -> FunctionSeq:
    """A periodic sequence whose (trace) I^K-cluster set is exactly ``target``.

    Points of ``target`` are spread over disjoint residue classes
    ``P_1..P_j`` that are neither in ``I`` nor in ``K``.  Moduli
    ``j, 2j, ...`` are tried up to ``max_modulus`` (default ``8j``).
    """
    if i.domain != OMEGA or k.domain != OMEGA:
        raise DomainError("realization needs omega ideals")
    if target == 0 or target & ~space.full:
        raise RealizationError("target must be a nonempty subset of the space")
    if not is_closed_set(space, target):
        raise RealizationError(f"target {space.to_labels(target)} is not closed")
    if not ideality_condition(i, k):
        raise RealizationError(f"{i} and {k} fail the ideality condition")
    pts = [x for x in range(space.size) if (target >> x) & 1]
    j = len(pts)
    limit = max_modulus or 8 * j
    tried = []
    for m in range(j, limit + 1, j):
        classes = admissible_partition(m, j, i, k)
        if classes is None:
            null_i = [r for r in range(m) if not is_positive(i, EpSet.periodic(m, [r]))]
            null_k = [r for r in range(m) if not is_positive(k, EpSet.periodic(m, [r]))]
            tried.append(f"mod {m}: residues in I {null_i}, residues in K {null_k}")
            continue
        period = [0] * m
        for idx, cls in enumerate(classes):
            for r in cls:
                period[r] = pts[idx]
        f = FunctionSeq.periodic(period)
        got = cluster_points(f, i, k, space, Semantics.TRACE)
        if got != target:  # pragma: no cover - would be a bug
            raise AssertionError(f"realized cluster set {space.to_labels(got)} != {space.to_labels(target)}")
        return f
    raise RealizationError(
        f"no admissible partition into {j} classes up to modulus {limit}: " + "; ".join(tried)
    )


# ---------------------------------------------------------------------------
# section battery


def _closed_sets(space: FiniteSpace) -> list[int]:
    return [space.full & ~u for u in space.opens if u != space.full]


def verify_section4(
    bounds: catalog.Bounds | None = None,
    semantics: Semantics = Semantics.TRACE,
    *,
    search_sample: int = 4,
) -> Report:
    """Cluster/limit point battery over omega instances.

    ``search_sample`` functions per (space, pair) on spaces of at most
    three points are also run through the direct limit-point search.
    """
    bounds = (bounds or catalog.Bounds()).resolved("s4")
    report = Report("s4", {**bounds.to_json(), "semantics": semantics.value})
    obs_gating = semantics is Semantics.TRACE
    report.check(
        "observation: C(I^K) in C(K)",
        gating=obs_gating,
        note=None if obs_gating else "report-only under padded semantics",
    )
    spaces = catalog.spaces_upto(bounds.k)
    pairs = [(i, k) for i, k in catalog.omega_pairs(bounds.p) if ideality_condition(i, k)]
    # every point set appearing as a minimal neighbourhood, per space size
    for size in range(1, bounds.k + 1):
        functions = catalog.omega_functions(size, bounds.p, bounds.f)
        group = [sp for sp in spaces if sp.size == size]
        subsets = range(1, 1 << size)
        for f in functions:
            hits = {u: hit_set(f, u) for u in subsets}
            for i, k in pairs:
                _section4_instance(report, group, f, hits, i, k, semantics, search_sample)
    _section4_realization(report, bounds)
    return report


def _section4_instance(report, group, f, hits, i, k, semantics, search_sample) -> None:
    ik = join(i, k)
    pos_k = {u: is_positive(k, a) for u, a in hits.items()}
    pos_join = {u: is_positive(ik, a) for u, a in hits.items()}
    degenerate = semantics is Semantics.PADDED and not is_subideal(i, k)
    for space in group:
        report.instances += 1
        mins = space.min_nbhd
        c_k = sum(1 << x for x in range(space.size) if pos_k[mins[x]])
        c_join = sum(1 << x for x in range(space.size) if pos_join[mins[x]])
        c_ik = space.full if degenerate else c_k
        l_ik, l_join = c_ik, c_join  # limit sets by the restriction characterization

        def ex(space=space):
            return catalog.instance_spec(space, {"I": i, "K": k}, f, 0, semantics=semantics.value)

        report.check("cluster set closed").record(closure(space, c_ik) == c_ik, ex)
        report.check("C(IuK) in C(I^K)").record(c_join & ~c_ik == 0, ex)
        report.check("L(I^K) in C(I^K)").record(l_ik & ~c_ik == 0, ex)
        report.check("L(IuK) in L(I^K)").record(l_join & ~l_ik == 0, ex)
        report.check("observation: C(I^K) in C(K)").record(c_ik & ~c_k == 0, ex)
        if search_sample and space.size <= 3 and _sampled(f, i, k, search_sample):
            sem = semantics
            ok = limit_points_search(f, i, k, space, sem) == l_ik
            ok = ok and cluster_points_search(f, i, k, space, sem) == c_ik
            report.check("limit/cluster search agrees").record(ok, ex)


def _sampled(f: FunctionSeq, i: Ideal, k: Ideal, per: int) -> bool:
    # a deterministic thin slice: short periods, trivial heads, small moduli
    return not f.head and f.p <= per and _instance_modulus(f, i, k) <= 6


def _section4_realization(report: Report, bounds: catalog.Bounds) -> None:
    residue_pairs = [(i, k) for i, k in catalog.omega_pairs(bounds.p) if i.generators or k.generators]
    for space in catalog.spaces_upto(bounds.k):
        for target in _closed_sets(space):
            if target == 0:
                continue
            ex = {"space": space.to_json(), "target": space.to_labels(target)}
            f = realize_cluster_set(space, target)
            report.check("realize round trip, I=K=Fin").record(
                cluster_points(f, FIN, FIN, space) == target, ex
            )
            # the first residue pair admitting a partition
            for i, k in residue_pairs:
                if not ideality_condition(i, k):
                    continue
                try:
                    g = realize_cluster_set(space, target, i, k)
                except RealizationError:
                    continue
                report.check("realize round trip, residue pair").record(
                    cluster_points(g, i, k, space) == target,
                    {**ex, "ideals": {"I": i.to_json(), "K": k.to_json()}},
                )
                break
            else:
                report.check("realize round trip, residue pair").record(False, ex)


def verify_padded_closed_form(n_max: int = 5, k_max: int = 3) -> Report:
    """Closed-form cluster sets vs exhaustive witness search, both semantics,
    every finite domain ``n <= n_max`` and space of at most ``k_max`` points."""
    from . import kernels
    from .ideals import enumerate_ideals_finite

    report = Report("padded-closed-form", {"n": n_max, "k": k_max, "backend": kernels.BACKEND})
    chk = report.check("closed form == witness search")
    for n in range(1, n_max + 1):
        masks = [ideal.grand_union.head for ideal in enumerate_ideals_finite(n)]
        for space in catalog.spaces_upto(k_max):
            for gi in masks:
                for gk in masks:
                    checks, bad = kernels.sweep_cluster(space.opens, space.min_nbhd, space.size, n, gi, gk)
                    report.instances += checks
                    chk.instances += checks
                    chk.violations += len(bad)
                    for code, x, padded, closed, found in bad[: 5 - len(chk.examples)]:
                        chk.examples.append(
                            {"n": n, "space": space.to_json(), "gI": gi, "gK": gk, "f": code, "x": x, "padded": padded}
                        )
    return report
