"""Finite topological spaces.

Points are indexed ``0..k-1`` and carry string labels; subsets are
bitmasks over point indices.  Every finite space is Alexandrov: the
intersection of all opens around ``x`` is itself open.  That minimal
neighbourhood is computed once at construction, and the convergence
code relies on it being the only neighbourhood that matters.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Sequence

from . import kernels

__all__ = [
    "TopologyError",
    "FiniteSpace",
    "PointMap",
    "MAX_POINTS",
    "MAX_ENUM_POINTS",
    "mk_space",
    "closure",
    "interior",
    "is_open_set",
    "is_discrete",
    "is_t1",
    "is_hausdorff",
    "quotient",
    "disjoint_sum",
    "subspace",
    "is_continuous",
    "enumerate_topologies",
    "enumerate_topologies_bruteforce",
    "sierpinski",
    "discrete",
    "indiscrete",
    "chain",
    "default_labels",
]

MAX_POINTS = 6
MAX_ENUM_POINTS = 4


class TopologyError(ValueError):
    pass


def default_labels(k: int) -> tuple[str, ...]:
    return tuple("abcdef"[:k])


def _popcount_order(masks: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(set(masks), key=lambda m: (m.bit_count(), m)))


@dataclass(frozen=True)
class FiniteSpace:
    points: tuple[str, ...]
    opens: tuple[int, ...]
    min_nbhd: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def full(self) -> int:
        return (1 << len(self.points)) - 1

    def index(self, label: str) -> int:
        try:
            return self.points.index(label)
        except ValueError:
            raise KeyError(f"unknown point {label!r}; points are {list(self.points)}") from None

    def to_mask(self, labels: Iterable[str]) -> int:
        m = 0
        for lab in labels:
            m |= 1 << self.index(lab)
        return m

    def to_labels(self, mask: int) -> list[str]:
        return [p for i, p in enumerate(self.points) if (mask >> i) & 1]

    def open_set(self):
        return frozenset(self.opens)

    def opens_containing(self, x: int) -> list[int]:
        return [u for u in self.opens if (u >> x) & 1]

    def to_json(self) -> dict:
        return {"points": list(self.points), "opens": [self.to_labels(u) for u in self.opens]}

    def __str__(self) -> str:
        opens = ", ".join("{" + ",".join(self.to_labels(u)) + "}" for u in self.opens)
        return f"Space[{','.join(self.points)}; {opens}]"


def mk_space(points: Sequence[str], opens: Iterable[Iterable[str] | int]) -> FiniteSpace:
    """Validate a family of opens and build the space.

    ``opens`` entries are label collections or raw bitmasks.
    """
    points = tuple(str(p) for p in points)
    k = len(points)
    if k == 0:
        raise TopologyError("a space needs at least one point")
    if k > MAX_POINTS:
        raise TopologyError(f"spaces are capped at {MAX_POINTS} points, got {k}")
    if len(set(points)) != k:
        raise TopologyError(f"duplicate point labels in {list(points)}")
    full = (1 << k) - 1
    masks = set()
    for u in opens:
        if isinstance(u, int):
            if u < 0 or u > full:
                raise TopologyError(f"open mask {u:#x} does not fit {k} points")
            masks.add(u)
            continue
        m = 0
        for lab in u:
            if lab not in points:
                raise TopologyError(f"open set mentions unknown point {lab!r}")
            m |= 1 << points.index(lab)
        masks.add(m)
    if 0 not in masks:
        raise TopologyError("the empty set is missing from the opens")
    if full not in masks:
        raise TopologyError("the whole space X is missing from the opens")
    ordered = _popcount_order(masks)
    for i, u in enumerate(ordered):
        for v in ordered[i + 1 :]:
            if u | v not in masks:
                raise TopologyError(f"union of {_fmt(points, u)} and {_fmt(points, v)} is not open")
            if u & v not in masks:
                raise TopologyError(f"intersection of {_fmt(points, u)} and {_fmt(points, v)} is not open")
    mins = []
    for x in range(k):
        m = full
        for u in ordered:
            if (u >> x) & 1:
                m &= u
        mins.append(m)
    return FiniteSpace(points, ordered, tuple(mins))


def _fmt(points: Sequence[str], mask: int) -> str:
    return "{" + ",".join(p for i, p in enumerate(points) if (mask >> i) & 1) + "}"


def closure(space: FiniteSpace, a: int) -> int:
    return sum(1 << x for x in range(space.size) if space.min_nbhd[x] & a)


def interior(space: FiniteSpace, a: int) -> int:
    return sum(1 << x for x in range(space.size) if space.min_nbhd[x] & ~a == 0)


def is_open_set(space: FiniteSpace, a: int) -> bool:
    return a in space.open_set()


def is_closed_set(space: FiniteSpace, a: int) -> bool:
    return (space.full & ~a) in space.open_set()


def _separations(space: FiniteSpace):
    for x in range(space.size):
        for y in range(space.size):
            if x != y:
                yield x, y


def is_t1(space: FiniteSpace) -> bool:
    # each point has an open avoiding each other point
    return all(
        any((u >> x) & 1 and not (u >> y) & 1 for u in space.opens) for x, y in _separations(space)
    )


def is_hausdorff(space: FiniteSpace) -> bool:
    return all(
        any(
            (u >> x) & 1 and (v >> y) & 1 and u & v == 0
            for u in space.opens
            for v in space.opens
        )
        for x, y in _separations(space)
        if x < y
    )


def is_discrete(space: FiniteSpace) -> bool:
    return len(space.opens) == 1 << space.size


@dataclass(frozen=True)
class PointMap:
    source: FiniteSpace
    target: FiniteSpace
    assignment: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.assignment) != self.source.size:
            raise TopologyError("point map must be total on the source")
        if any(not 0 <= y < self.target.size for y in self.assignment):
            raise TopologyError("point map leaves the target")

    def __call__(self, x: int) -> int:
        return self.assignment[x]

    def preimage(self, b: int) -> int:
        return sum(1 << x for x, y in enumerate(self.assignment) if (b >> y) & 1)

    def image(self, a: int) -> int:
        return sum(1 << y for x, y in enumerate(self.assignment) if (a >> x) & 1)


def is_continuous(m: PointMap) -> bool:
    src = m.source.open_set()
    return all(m.preimage(v) in src for v in m.target.opens)


def _normalize_blocks(space: FiniteSpace, partition) -> list[int]:
    blocks = []
    for block in partition:
        if isinstance(block, int):
            blocks.append(block)
        else:
            b = 0
            for p in block:
                b |= 1 << (p if isinstance(p, int) else space.index(p))
            blocks.append(b)
    seen = 0
    for b in blocks:
        if b == 0:
            raise TopologyError("partition has an empty block")
        if b & seen:
            raise TopologyError("partition blocks overlap")
        seen |= b
    if seen != space.full:
        raise TopologyError("partition does not cover the space")
    return blocks


def quotient(space: FiniteSpace, partition) -> tuple[FiniteSpace, PointMap]:
    """Quotient by a partition (blocks of labels, indices or masks).

    Block labels join member labels with ``+``.
    """
    blocks = _normalize_blocks(space, partition)
    labels = ["+".join(space.to_labels(b)) for b in blocks]
    assignment = [0] * space.size
    for i, b in enumerate(blocks):
        for x in range(space.size):
            if (b >> x) & 1:
                assignment[x] = i
    src = space.open_set()
    opens = []
    for a in range(1 << len(blocks)):
        pre = 0
        for i, b in enumerate(blocks):
            if (a >> i) & 1:
                pre |= b
        if pre in src:
            opens.append(a)
    q = mk_space(labels, opens)
    return q, PointMap(space, q, tuple(assignment))


def disjoint_sum(spaces: Sequence[FiniteSpace]) -> FiniteSpace:
    """Topological sum; point ``p`` of summand ``i`` is labelled ``"i.p"``."""
    labels: list[str] = []
    families: list[tuple[int, ...]] = []
    shift = 0
    for i, sp in enumerate(spaces):
        labels.extend(f"{i}.{p}" for p in sp.points)
        families.append(tuple(u << shift for u in sp.opens))
        shift += sp.size
    opens = {0}
    for fam in families:
        opens = {u | v for u in opens for v in fam}
    return mk_space(labels, opens)


def subspace(space: FiniteSpace, a: int | Iterable[str]) -> FiniteSpace:
    if not isinstance(a, int):
        a = space.to_mask(a)
    idx = [x for x in range(space.size) if (a >> x) & 1]
    if not idx:
        raise TopologyError("subspace must be nonempty")

    def compress(u: int) -> int:
        return sum(1 << j for j, x in enumerate(idx) if (u >> x) & 1)

    return mk_space([space.points[x] for x in idx], {compress(u & a) for u in space.opens})


def inclusion(space: FiniteSpace, a: int) -> PointMap:
    sub = subspace(space, a)
    idx = [x for x in range(space.size) if (a >> x) & 1]
    return PointMap(sub, space, tuple(idx))


def _preorders(k: int) -> Iterator[list[int]]:
    """Reflexive transitive relations on ``k`` points as up-set rows."""
    pairs = [(i, j) for i in range(k) for j in range(k) if i != j]
    for bits in product((0, 1), repeat=len(pairs)):
        up = [1 << i for i in range(k)]
        for (i, j), b in zip(pairs, bits):
            if b:
                up[i] |= 1 << j
        if all(up[j] & ~up[i] == 0 for i in range(k) for j in range(k) if (up[i] >> j) & 1):
            yield up


def enumerate_topologies(k: int, labels: Sequence[str] | None = None) -> Iterator[FiniteSpace]:
    """All labelled topologies on ``k`` points.

    Walks specialization preorders: ``up[x]`` is the minimal
    neighbourhood of ``x`` and the opens are the unions of those.
    """
    if not 1 <= k <= MAX_ENUM_POINTS:
        raise TopologyError(f"topology enumeration needs 1 <= k <= {MAX_ENUM_POINTS}, got {k}")
    labels = tuple(labels) if labels else default_labels(k)
    for up in _preorders(k):
        opens = set()
        for sel in range(1 << k):
            u = 0
            for x in range(k):
                if (sel >> x) & 1:
                    u |= up[x]
            opens.add(u)
        yield mk_space(labels, opens)


def enumerate_topologies_bruteforce(k: int) -> list[tuple[int, ...]]:
    """Independent oracle: filter every family of subsets by the axioms.

    Returns the open families (sorted masks) in the kernel's scan order.
    """
    if not 1 <= k <= MAX_ENUM_POINTS:
        raise TopologyError(f"topology enumeration needs 1 <= k <= {MAX_ENUM_POINTS}, got {k}")
    out = []
    for fam in kernels.axiom_filter_topologies(k):
        out.append(tuple(m for m in range(1 << k) if (fam >> m) & 1))
    return out


def sierpinski() -> FiniteSpace:
    return mk_space(("a", "b"), [[], ["a"], ["a", "b"]])


def discrete(k: int) -> FiniteSpace:
    return mk_space(default_labels(k), range(1 << k))


def indiscrete(k: int) -> FiniteSpace:
    return mk_space(default_labels(k), [0, (1 << k) - 1])


def chain(k: int) -> FiniteSpace:
    """Opens ``{}, {a}, {a,b}, ...``."""
    return mk_space(default_labels(k), [(1 << i) - 1 for i in range(k + 1)])
