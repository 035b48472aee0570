"""Ideals on an index domain.

An ideal is given by finitely many generator sets ``G_1, ..., G_k``.  On
omega it also contains every finite set, so membership reads::

    A in I  <=>  A \\ (G_1 u ... u G_k) is finite

On ``Finite(n)`` the test is emptiness instead.  Every ideal on a finite
set is the down-set of the union of its members, so nothing is lost by
this representation there.

``I0`` (density zero) is an alias of ``Fin``: an eventually periodic set
has density zero iff it is finite, so the two ideals agree on every set
this library can represent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

from .indexsets import (
    OMEGA,
    DomainError,
    EpSet,
    Finite,
    IndexDomain,
    complement,
    is_finite_set,
    setminus,
    union_all,
)

__all__ = [
    "ImproperIdealError",
    "Ideal",
    "FIN",
    "I0",
    "generated",
    "principal",
    "contains",
    "is_proper",
    "in_dual_filter",
    "is_positive",
    "grand_union",
    "join",
    "ideality_condition",
    "extend_by_member",
    "canonical_witness",
    "is_subideal",
    "enumerate_ideals_finite",
    "MAX_ENUM_N",
]

MAX_ENUM_N = 8


class ImproperIdealError(ValueError):
    """Operation needs a proper ideal."""


@dataclass(frozen=True)
class Ideal:
    domain: IndexDomain
    generators: tuple[EpSet, ...] = ()
    name: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        for g in self.generators:
            if g.domain != self.domain:
                raise DomainError(f"generator {g} is not on {self.domain}")

    @property
    def includes_fin(self) -> bool:
        return self.domain == OMEGA

    @cached_property
    def grand_union(self) -> EpSet:
        return union_all(self.generators, self.domain)

    def __contains__(self, a: EpSet) -> bool:
        return contains(self, a)

    def __str__(self) -> str:
        if self.name:
            return self.name
        if not self.generators:
            return "Fin" if self.domain == OMEGA else "gen()"
        return "gen(" + ", ".join(str(g) for g in self.generators) + ")"

    def to_json(self) -> dict:
        return {"gen": [g.to_json() for g in self.generators]}


FIN = Ideal(OMEGA, (), "Fin")
I0 = Ideal(OMEGA, (), "I0")


def generated(domain: IndexDomain, *gens: EpSet, name: str | None = None) -> Ideal:
    return Ideal(domain, tuple(gens), name)


def principal(n: int | Finite, elements: Iterable[int]) -> Ideal:
    """The down-set of one subset of a finite domain."""
    dom = n if isinstance(n, Finite) else Finite(n)
    return Ideal(dom, (EpSet.finite(dom, elements),))


def _check_domain(ideal: Ideal, a: EpSet) -> None:
    if ideal.domain != a.domain:
        raise DomainError(f"set on {a.domain} tested against ideal on {ideal.domain}")


def contains(ideal: Ideal, a: EpSet) -> bool:
    _check_domain(ideal, a)
    rest = setminus(a, ideal.grand_union)
    if ideal.domain == OMEGA:
        return is_finite_set(rest)
    return rest.is_empty()


def is_proper(ideal: Ideal) -> bool:
    return not contains(ideal, EpSet.full(ideal.domain))


def in_dual_filter(ideal: Ideal, m: EpSet) -> bool:
    if not is_proper(ideal):
        raise ImproperIdealError(f"{ideal} is improper; its dual filter is degenerate")
    return contains(ideal, complement(m))


def is_positive(ideal: Ideal, a: EpSet) -> bool:
    return not contains(ideal, a)


def grand_union(ideal: Ideal) -> EpSet:
    return ideal.grand_union


def join(i: Ideal, k: Ideal) -> Ideal:
    """Smallest ideal containing both; may be improper."""
    if i.domain != k.domain:
        raise DomainError(f"domain mismatch: {i.domain} vs {k.domain}")
    return Ideal(i.domain, i.generators + k.generators)


def ideality_condition(i: Ideal, k: Ideal) -> bool:
    return is_proper(join(i, k))


def extend_by_member(k: Ideal, j: EpSet) -> Ideal:
    """Ideal generated by ``k`` together with the single set ``j``.

    The result may be improper; check with :func:`is_proper`.
    """
    _check_domain(k, j)
    return Ideal(k.domain, k.generators + (j,))


def canonical_witness(ideal: Ideal) -> EpSet:
    """Smallest (up to finite sets on omega) member of the dual filter."""
    if not is_proper(ideal):
        raise ImproperIdealError(f"{ideal} is improper")
    return complement(ideal.grand_union)


def is_subideal(i: Ideal, k: Ideal) -> bool:
    """``I`` is a subfamily of ``K``."""
    if i.domain != k.domain:
        raise DomainError(f"domain mismatch: {i.domain} vs {k.domain}")
    return contains(k, i.grand_union)


def enumerate_ideals_finite(domain: Finite | int) -> Iterator[Ideal]:
    """All proper ideals on ``{0..n-1}``: the down-sets of proper subsets."""
    if isinstance(domain, int):
        domain = Finite(domain)
    if not isinstance(domain, Finite):
        raise DomainError("only finite domains are enumerable")
    if domain.n > MAX_ENUM_N:
        raise ValueError(f"ideal enumeration is capped at n={MAX_ENUM_N}, got {domain.n}")
    full = (1 << domain.n) - 1
    for b in range(full):
        yield Ideal(domain, (EpSet.from_mask(domain, b),))
