"""Instance generators shared by the verification suites and ``search``.

Everything here is deterministic: enumeration order is fixed and
sampling uses an even stride rather than a random generator, so two
runs with the same bounds visit the same instances in the same order.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace
from functools import lru_cache
from itertools import product
from typing import Callable, Iterator, Sequence

from .ideals import FIN, Ideal, enumerate_ideals_finite, generated
from .indexsets import OMEGA, EpSet, Finite
from .topology import FiniteSpace, enumerate_topologies

__all__ = [
    "BoundsError",
    "Bounds",
    "Battery",
    "OMEGA_IDEAL_SPECS",
    "omega_ideals",
    "omega_pairs",
    "finite_functions",
    "omega_functions",
    "spaces_upto",
    "section2_batteries",
    "instance_spec",
]


class BoundsError(ValueError):
    pass


_DEFAULTS = {
    "s2": {"k": 3, "n": 4, "p": 6, "f": 48},
    "s3": {"k": 4, "n": 4, "p": 6, "f": 48},
    "s4": {"k": 4, "n": 4, "p": 6, "f": 48},
    "search": {"k": 3, "n": 4, "p": 6, "f": 48},
}
_CAPS = {"k": 4, "n": 6, "p": 12, "f": 4096}


@dataclass(frozen=True)
class Bounds:
    """Battery sizes: ``k`` max points per space, ``n`` finite index
    domain size, ``p`` max omega modulus/period, ``f`` omega functions
    sampled per space.  ``None`` means the suite default."""

    k: int | None = None
    n: int | None = None
    p: int | None = None
    f: int | None = None

    def __post_init__(self) -> None:
        for key, cap in _CAPS.items():
            val = getattr(self, key)
            if val is not None and not (isinstance(val, int) and 1 <= val <= cap):
                raise BoundsError(f"bound {key}={val!r} outside 1..{cap}")

    @classmethod
    def parse(cls, text: str | None) -> Bounds:
        if not text:
            return cls()
        vals = {}
        for part in text.split(","):
            key, sep, raw = part.partition("=")
            key = key.strip()
            if not sep or key not in _CAPS:
                raise BoundsError(f"bad bound {part!r}; expected k=..,n=..,p=..,f=..")
            try:
                vals[key] = int(raw)
            except ValueError:
                raise BoundsError(f"bound {key} needs an integer, got {raw!r}") from None
        return cls(**vals)

    def resolved(self, suite: str) -> Bounds:
        defaults = _DEFAULTS[suite]
        return replace(self, **{k: v for k, v in defaults.items() if getattr(self, k) is None})

    def to_json(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


@dataclass(frozen=True)
class Battery:
    name: str
    spaces: tuple[FiniteSpace, ...]
    pairs: tuple[tuple[Ideal, Ideal], ...]
    functions: Callable[[FiniteSpace], Sequence]
    js: tuple[Ideal, ...] = ()


# -- ideals -----------------------------------------------------------------

# (modulus, residues) generator lists; the empty list is Fin.
OMEGA_IDEAL_SPECS: tuple[tuple[tuple[int, tuple[int, ...]], ...], ...] = (
    (),
    ((2, (0,)),),
    ((2, (1,)),),
    ((3, (0,)),),
    ((3, (1,)),),
    ((4, (0,)),),
    ((4, (2,)),),
    ((5, (0,)),),
    ((6, (1, 2)),),
    ((3, (0,)), (4, (1,))),
)


def _spec_name(spec) -> str:
    if not spec:
        return "Fin"
    parts = [",".join(map(str, res)) + f" mod {p}" for p, res in spec]
    return "gen(" + "; ".join(parts) + ")"


@lru_cache(maxsize=None)
def omega_ideals(pmax: int = 6) -> tuple[Ideal, ...]:
    out = []
    for spec in OMEGA_IDEAL_SPECS:
        if all(p <= pmax for p, _ in spec):
            if not spec:
                out.append(FIN)
            else:
                gens = [EpSet.periodic(p, res) for p, res in spec]
                out.append(generated(OMEGA, *gens, name=_spec_name(spec)))
    return tuple(out)


def omega_pairs(pmax: int = 6) -> tuple[tuple[Ideal, Ideal], ...]:
    ids = omega_ideals(pmax)
    return tuple((i, k) for i in ids for k in ids)


def finite_pairs(n: int) -> tuple[tuple[Ideal, Ideal], ...]:
    ids = tuple(enumerate_ideals_finite(n))
    return tuple((i, k) for i in ids for k in ids)


# -- functions --------------------------------------------------------------


@lru_cache(maxsize=None)
def finite_functions(k: int, n: int):
    from .convergence import FunctionSeq

    return tuple(FunctionSeq.finite(vals[::-1]) for vals in product(range(k), repeat=n))


def _stride(items: list, cap: int) -> list:
    if len(items) <= cap:
        return items
    return [items[(i * len(items)) // cap] for i in range(cap)]


@lru_cache(maxsize=None)
def omega_functions(k: int, pmax: int, cap: int):
    """Eventually periodic functions into ``k`` points: periods up to
    ``pmax``, evenly strided down to ``cap``, plus a head-perturbed
    variant of every fourth one."""
    from .convergence import FunctionSeq

    seen: dict = {}
    for p in range(1, pmax + 1):
        for vals in product(range(k), repeat=p):
            f = FunctionSeq.periodic(vals)
            seen.setdefault(f, None)
    base = _stride(list(seen), cap)
    out = list(base)
    if k > 1:
        for f in base[::4]:
            g = FunctionSeq.periodic(f.period, [(f.period[0] + 1) % k])
            if g not in seen:
                out.append(g)
    return tuple(out)


@lru_cache(maxsize=None)
def spaces_upto(kmax: int, kmin: int = 1) -> tuple[FiniteSpace, ...]:
    return tuple(sp for k in range(kmin, kmax + 1) for sp in enumerate_topologies(k))


def section2_batteries(bounds: Bounds) -> Iterator[Battery]:
    spaces = spaces_upto(bounds.k)
    n = bounds.n
    yield Battery(
        f"finite(n={n})",
        spaces,
        finite_pairs(n),
        lambda sp: finite_functions(sp.size, n),
        (enumerate_ideals_finite_single(n),),
    )
    js = [FIN] + [i for i in omega_ideals(bounds.p) if i.name == "gen(0 mod 3)"]
    yield Battery(
        f"omega(p<={bounds.p})",
        spaces,
        omega_pairs(bounds.p),
        lambda sp: omega_functions(sp.size, bounds.p, bounds.f),
        tuple(js),
    )


def enumerate_ideals_finite_single(n: int) -> Ideal:
    """The down-set of the last index, used as the third ideal J."""
    return generated(Finite(n), EpSet.finite(n, [n - 1]), name="J")


# -- replayable instance descriptions --------------------------------------


def instance_spec(
    space: FiniteSpace, ideals: dict[str, Ideal], f, x: int | None, mode: str | None = None, **extra
) -> dict:
    """A config dict that ``ik-lab check --config`` accepts."""
    dom = f.domain
    out = {
        "domain": "omega" if dom == OMEGA else {"finite": dom.n},
        "space": space.to_json(),
        "ideals": {name: ideal.to_json() for name, ideal in ideals.items()},
        "function": f.to_json(space.points),
    }
    if x is not None:
        out["point"] = space.points[x]
    if mode is not None:
        out["mode"] = mode
    out.update(extra)
    return out
