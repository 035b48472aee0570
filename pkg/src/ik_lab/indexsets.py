"""Exact algebra of index subsets.

Two index domains are supported:

* ``Finite(n)``: the set ``{0, ..., n-1}``; subsets are bitmasks.
* ``OMEGA``: the natural numbers, restricted to *eventually periodic*
  subsets.  Such a set is stored as a head window ``[0, q)`` given
  explicitly plus a set of residues modulo ``p``; an index ``s >= q``
  belongs to the set iff ``s % p`` is one of the residues.

Every :class:`EpSet` is kept in canonical form (minimal period, then
minimal head), so structural equality is set equality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Iterable, Iterator

__all__ = [
    "DomainError",
    "Finite",
    "PeriodicOmega",
    "OMEGA",
    "IndexDomain",
    "EpSet",
    "member",
    "union",
    "intersect",
    "complement",
    "setminus",
    "is_subset",
    "is_finite_set",
    "tail_density",
    "enumerate_subsets",
    "MAX_FINITE_N",
]

MAX_FINITE_N = 24


class DomainError(ValueError):
    """Operands live on different index domains, or the domain is unsuitable."""


@dataclass(frozen=True)
class Finite:
    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or not 1 <= self.n <= MAX_FINITE_N:
            raise DomainError(f"finite domain needs 1 <= n <= {MAX_FINITE_N}, got {self.n!r}")

    def __str__(self) -> str:
        return f"Finite({self.n})"


@dataclass(frozen=True)
class PeriodicOmega:
    def __str__(self) -> str:
        return "omega"


OMEGA = PeriodicOmega()
IndexDomain = Finite | PeriodicOmega


def _bits(elements: Iterable[int]) -> int:
    mask = 0
    for e in elements:
        if e < 0:
            raise ValueError(f"negative index {e}")
        mask |= 1 << e
    return mask


def _elements(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def _rotate(mask: int, d: int, p: int) -> int:
    """Residue set ``{(r + d) % p : r in mask}``."""
    full = (1 << p) - 1
    return ((mask << d) | (mask >> (p - d))) & full


@lru_cache(maxsize=None)
def _canonical(head: int, q: int, p: int, tail: int) -> tuple[int, int, int, int]:
    full = (1 << p) - 1
    tail &= full
    if tail == 0 or tail == full:
        p, tail = 1, (1 if tail else 0)
    else:
        for d in range(1, p):
            if p % d == 0 and _rotate(tail, d, p) == tail:
                # residues mod d: r mod d for r in tail (well defined since d | p)
                tail = tail & ((1 << d) - 1)
                p = d
                break
    head &= (1 << q) - 1
    while q > 0:
        s = q - 1
        if ((head >> s) & 1) != ((tail >> (s % p)) & 1):
            break
        q -= 1
        head &= (1 << q) - 1
    return head, q, p, tail


@dataclass(frozen=True)
class EpSet:
    """An index subset over one domain.

    On ``Finite(n)`` only ``head`` is meaningful (``q == n``, ``p == 1``,
    ``tail == 0``).  On ``OMEGA`` the fields are the canonical
    (head, q, p, tail) description.  Build values through the
    constructors, not the raw initializer.
    """

    domain: IndexDomain
    head: int
    q: int
    p: int
    tail: int

    # -- constructors -------------------------------------------------
    @classmethod
    def finite(cls, n: int | Finite, elements: Iterable[int] = ()) -> EpSet:
        dom = n if isinstance(n, Finite) else Finite(n)
        mask = _bits(elements)
        if mask >> dom.n:
            raise DomainError(f"elements {_elements(mask >> dom.n << dom.n)} outside {dom}")
        return cls(dom, mask, dom.n, 1, 0)

    @classmethod
    def from_mask(cls, n: int | Finite, mask: int) -> EpSet:
        dom = n if isinstance(n, Finite) else Finite(n)
        if mask < 0 or mask >> dom.n:
            raise DomainError(f"mask {mask:#x} does not fit {dom}")
        return cls(dom, mask, dom.n, 1, 0)

    @classmethod
    def periodic(
        cls,
        p: int,
        tail: Iterable[int] = (),
        head: Iterable[int] = (),
        q: int | None = None,
    ) -> EpSet:
        """Eventually periodic subset of omega.

        With ``q`` given, ``head`` lists exactly the members below ``q``.
        With ``q`` omitted, ``head`` lists extra members added to the
        residue classes (``{0 mod 4} + {5}`` is ``periodic(4, [0], [5])``).
        """
        if not isinstance(p, int) or p < 1:
            raise ValueError(f"modulus must be a positive integer, got {p!r}")
        tail_mask = 0
        for r in tail:
            if not 0 <= r < p:
                raise ValueError(f"residue {r} out of range for modulus {p}")
            tail_mask |= 1 << r
        head_mask = _bits(head)
        if q is None:
            q = head_mask.bit_length()
            for s in range(q):
                if (tail_mask >> (s % p)) & 1:
                    head_mask |= 1 << s
        else:
            if q < 0:
                raise ValueError(f"head length must be non-negative, got {q}")
            if head_mask >> q:
                raise ValueError(f"head elements must lie below q={q}")
        return cls(OMEGA, *_canonical(head_mask, q, p, tail_mask))

    @classmethod
    def raw_omega(cls, head: int, q: int, p: int, tail: int) -> EpSet:
        """Canonicalize a bitmask description ``(head, q, p, tail)``."""
        return cls(OMEGA, *_canonical(head, q, p, tail))

    @classmethod
    def empty(cls, domain: IndexDomain) -> EpSet:
        if isinstance(domain, Finite):
            return cls(domain, 0, domain.n, 1, 0)
        return cls(OMEGA, 0, 0, 1, 0)

    @classmethod
    def full(cls, domain: IndexDomain) -> EpSet:
        if isinstance(domain, Finite):
            return cls(domain, (1 << domain.n) - 1, domain.n, 1, 0)
        return cls(OMEGA, 0, 0, 1, 1)

    # -- queries ------------------------------------------------------
    @property
    def is_omega(self) -> bool:
        return isinstance(self.domain, PeriodicOmega)

    @property
    def mask(self) -> int:
        if self.is_omega:
            raise DomainError("an omega set has no finite bitmask")
        return self.head

    def __contains__(self, s: int) -> bool:
        return member(self, s)

    def tail_residues(self) -> list[int]:
        return _elements(self.tail)

    def head_elements(self) -> list[int]:
        return _elements(self.head)

    def elements_below(self, bound: int) -> list[int]:
        return [s for s in range(bound) if member(self, s)]

    def is_empty(self) -> bool:
        return self.head == 0 and self.tail == 0

    def to_json(self) -> list[int] | dict:
        if not self.is_omega:
            return _elements(self.head)
        return {"head": _elements(self.head), "q": self.q, "p": self.p, "tail": _elements(self.tail)}

    @classmethod
    def from_json(cls, data, domain: IndexDomain) -> EpSet:
        if isinstance(domain, Finite):
            if not isinstance(data, list):
                raise ValueError(f"finite-domain set must be a list of indices, got {data!r}")
            return cls.finite(domain, data)
        if isinstance(data, list):
            return cls.periodic(1, [], data)
        if not isinstance(data, dict):
            raise ValueError(f"omega set must be a list or an object, got {data!r}")
        unknown = set(data) - {"head", "q", "p", "tail"}
        if unknown:
            raise ValueError(f"unknown keys in set description: {sorted(unknown)}")
        return cls.periodic(data.get("p", 1), data.get("tail", []), data.get("head", []), data.get("q"))

    def __str__(self) -> str:
        if not self.is_omega:
            return "{" + ",".join(map(str, _elements(self.head))) + "}"
        parts = []
        if self.q:
            parts.append(f"head[0,{self.q})={_elements(self.head)}")
        if self.tail == 0:
            parts.append("tail=none")
        elif self.p == 1:
            parts.append("tail=all")
        else:
            parts.append(f"tail={_elements(self.tail)} mod {self.p}")
        return "EP(" + ", ".join(parts) + ")"


def member(a: EpSet, s: int) -> bool:
    if not isinstance(s, int) or s < 0:
        raise DomainError(f"index must be a non-negative integer, got {s!r}")
    if not a.is_omega:
        if s >= a.domain.n:
            raise DomainError(f"index {s} outside {a.domain}")
        return bool((a.head >> s) & 1)
    if s < a.q:
        return bool((a.head >> s) & 1)
    return bool((a.tail >> (s % a.p)) & 1)


def _check_same(a: EpSet, b: EpSet) -> None:
    if a.domain != b.domain:
        raise DomainError(f"domain mismatch: {a.domain} vs {b.domain}")


def _lift(a: EpSet, q: int, p: int) -> tuple[int, int]:
    """Head bits on ``[0, q)`` and tail residues mod ``p`` (``a.p | p``, ``q >= a.q``)."""
    head = a.head
    for s in range(a.q, q):
        if (a.tail >> (s % a.p)) & 1:
            head |= 1 << s
    tail = 0
    for r in range(p):
        if (a.tail >> (r % a.p)) & 1:
            tail |= 1 << r
    return head, tail


@lru_cache(maxsize=1 << 16)
def _combine(a: EpSet, b: EpSet, op: str) -> EpSet:
    if not a.is_omega:
        full = (1 << a.domain.n) - 1
        if op == "or":
            m = a.head | b.head
        elif op == "and":
            m = a.head & b.head
        else:
            m = a.head & ~b.head & full
        return EpSet(a.domain, m, a.q, 1, 0)
    q, p = max(a.q, b.q), lcm(a.p, b.p)
    ha, ta = _lift(a, q, p)
    hb, tb = _lift(b, q, p)
    full = (1 << p) - 1
    if op == "or":
        h, t = ha | hb, ta | tb
    elif op == "and":
        h, t = ha & hb, ta & tb
    else:
        h, t = ha & ~hb, ta & ~tb & full
    return EpSet.raw_omega(h & ((1 << q) - 1), q, p, t)


def union(a: EpSet, b: EpSet) -> EpSet:
    _check_same(a, b)
    return _combine(a, b, "or")


def intersect(a: EpSet, b: EpSet) -> EpSet:
    _check_same(a, b)
    return _combine(a, b, "and")


def setminus(a: EpSet, b: EpSet) -> EpSet:
    _check_same(a, b)
    return _combine(a, b, "diff")


def complement(a: EpSet) -> EpSet:
    if not a.is_omega:
        return EpSet(a.domain, ~a.head & ((1 << a.domain.n) - 1), a.q, 1, 0)
    return EpSet.raw_omega(~a.head & ((1 << a.q) - 1), a.q, a.p, ~a.tail & ((1 << a.p) - 1))


def union_all(sets: Iterable[EpSet], domain: IndexDomain) -> EpSet:
    acc = EpSet.empty(domain)
    for s in sets:
        acc = union(acc, s)
    return acc


def is_subset(a: EpSet, b: EpSet) -> bool:
    return setminus(a, b).is_empty()


def is_finite_set(a: EpSet) -> bool:
    return not a.is_omega or a.tail == 0


def tail_density(a: EpSet) -> Fraction:
    if not a.is_omega:
        raise DomainError("density is only defined on omega")
    return Fraction(a.tail.bit_count(), a.p)


def enumerate_subsets(domain: Finite | int) -> Iterator[EpSet]:
    """All ``2**n`` subsets of a finite domain, in bitmask order."""
    if isinstance(domain, int):
        domain = Finite(domain)
    if not isinstance(domain, Finite):
        raise DomainError("subsets of omega cannot be enumerated")
    for m in range(1 << domain.n):
        yield EpSet(domain, m, domain.n, 1, 0)
