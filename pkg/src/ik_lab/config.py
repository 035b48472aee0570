"""Instance configs: JSON with named builtins, validated into library objects.

A config looks like::

    {
      "domain": "omega",                      # or {"finite": 4}; inferred if absent
      "space": "sierpinski",                  # or {"points": [...], "opens": [[...], ...]}
      "ideals": {"I": "Fin", "K": {"gen": [{"p": 2, "tail": [0]}]}},
      "function": {"head": [], "period": ["b", "a"]},   # or {"values": [...]} / a list
      "point": "a",
      "mode": "I^K"
    }

Every problem is reported as a :class:`ConfigError` carrying the line
and column of the offending key in the source text.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any

from .convergence import FunctionSeq, Mode, ModeError, parse_mode
from .ideals import FIN, I0, Ideal, generated, principal
from .indexsets import OMEGA, DomainError, EpSet, Finite, IndexDomain
from .topology import FiniteSpace, TopologyError, chain, discrete, indiscrete, mk_space, sierpinski

__all__ = ["ConfigError", "LabConfig", "parse_config", "load_config", "parse_space", "parse_ideal"]

_KEYS = {"domain", "space", "ideals", "function", "point", "mode", "semantics", "set", "target"}


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None, source: str = "<config>"):
        self.line, self.col, self.source = line, col, source
        where = f"{source}:{line}:{col}: " if line is not None else f"{source}: "
        super().__init__(where + message)


@dataclass
class LabConfig:
    domain: IndexDomain
    space: FiniteSpace | None = None
    ideals: dict[str, Ideal] = field(default_factory=dict)
    function: FunctionSeq | None = None
    point: int | None = None
    mode_text: str | None = None
    semantics: str | None = None
    set_mask: int | None = None
    target: int | None = None
    raw: dict = field(default_factory=dict)

    def mode(self, override: str | None = None) -> Mode:
        text = override or self.mode_text
        if text is None:
            raise ConfigError("no mode given (config key 'mode' or --mode)")
        try:
            return parse_mode(text, self.ideals)
        except (ModeError, DomainError, KeyError, ValueError) as exc:
            raise ConfigError(f"bad mode {text!r}: {exc}") from None

    def require(self, *names: str) -> None:
        for name in names:
            if getattr(self, name) is None:
                raise ConfigError(f"config needs {name!r}")


class _Locator:
    """Maps a key path back to a source position (best effort: first match of the last key)."""

    def __init__(self, text: str, source: str):
        self.text, self.source = text, source

    def error(self, path: tuple, message: str) -> ConfigError:
        line = col = None
        for key in reversed(path):
            if isinstance(key, str):
                m = re.search(r'"' + re.escape(key) + r'"\s*:', self.text)
                if m:
                    line = self.text.count("\n", 0, m.start()) + 1
                    col = m.start() - (self.text.rfind("\n", 0, m.start()) + 1) + 1
                    break
        label = ".".join(str(k) for k in path)
        return ConfigError(f"{label}: {message}" if label else message, line, col, self.source)


_SPACE_BUILTIN = re.compile(r"(discrete|indiscrete|chain):(\d+)$")


def parse_space(spec: Any) -> FiniteSpace:
    if isinstance(spec, str):
        if spec == "sierpinski":
            return sierpinski()
        m = _SPACE_BUILTIN.match(spec)
        if not m:
            raise ValueError(f"unknown space builtin {spec!r}; try sierpinski, discrete:k, indiscrete:k, chain:k")
        k = int(m.group(2))
        return {"discrete": discrete, "indiscrete": indiscrete, "chain": chain}[m.group(1)](k)
    if not isinstance(spec, dict) or set(spec) != {"points", "opens"}:
        raise ValueError('space must be a builtin name or {"points": [...], "opens": [...]}')
    points, opens = spec["points"], spec["opens"]
    if not isinstance(points, list) or not all(isinstance(p, str) for p in points):
        raise ValueError("points must be a list of strings")
    if not isinstance(opens, list) or not all(isinstance(u, list) for u in opens):
        raise ValueError("opens must be a list of point lists")
    return mk_space(points, opens)


def parse_domain(spec: Any) -> IndexDomain:
    if spec == "omega":
        return OMEGA
    if isinstance(spec, dict) and set(spec) == {"finite"} and isinstance(spec["finite"], int):
        return Finite(spec["finite"])
    raise ValueError('domain must be "omega" or {"finite": n}')


def parse_ideal(spec: Any, domain: IndexDomain, name: str | None = None) -> Ideal:
    if isinstance(spec, str):
        if spec in ("Fin", "I0"):
            if domain != OMEGA:
                raise DomainError(f"{spec} is improper on {domain}; use principal:[...]")
            return FIN if spec == "Fin" else I0
        if spec.startswith("principal:"):
            if not isinstance(domain, Finite):
                raise DomainError("principal ideals live on finite domains")
            elems = json.loads(spec[len("principal:") :])
            if not isinstance(elems, list):
                raise ValueError("principal:[...] needs a list of indices")
            ideal = principal(domain, elems)
            return Ideal(ideal.domain, ideal.generators, name)
        raise ValueError(f"unknown ideal builtin {spec!r}; try Fin, I0, principal:[...], or {{\"gen\": [...]}}")
    if not isinstance(spec, dict) or set(spec) != {"gen"} or not isinstance(spec["gen"], list):
        raise ValueError('ideal must be a builtin name or {"gen": [set, ...]}')
    return generated(domain, *(EpSet.from_json(g, domain) for g in spec["gen"]), name=name)


def _infer_domain(data: dict) -> IndexDomain:
    fn = data.get("function")
    if isinstance(fn, list):
        return Finite(len(fn))
    if isinstance(fn, dict) and "values" in fn and isinstance(fn["values"], list):
        return Finite(len(fn["values"]))
    return OMEGA


def _parse_function(spec: Any, space: FiniteSpace, domain: IndexDomain) -> FunctionSeq:
    def idx(labels, key):
        if not isinstance(labels, list):
            raise ValueError(f"{key} must be a list of point labels")
        return [space.index(lab) for lab in labels]

    if isinstance(spec, list):
        spec = {"values": spec}
    if not isinstance(spec, dict):
        raise ValueError('function must be a list, {"values": [...]} or {"head": [...], "period": [...]}')
    if "values" in spec:
        if set(spec) != {"values"}:
            raise ValueError("finite functions take only 'values'")
        f = FunctionSeq.finite(idx(spec["values"], "values"))
    else:
        unknown = set(spec) - {"head", "period"}
        if unknown or "period" not in spec:
            raise ValueError("omega functions need 'period' (and optional 'head')")
        f = FunctionSeq.periodic(idx(spec["period"], "period"), idx(spec.get("head", []), "head"))
    if f.domain != domain:
        raise DomainError(f"function lives on {f.domain} but the config domain is {domain}")
    return f


def _parse_set(spec: Any, space: FiniteSpace) -> int:
    if isinstance(spec, str):
        spec = parse_point_list(spec)
    if not isinstance(spec, list):
        raise ValueError("a point set is a list of labels")
    return space.to_mask(spec)


def parse_point_list(text: str) -> list[str]:
    """``'[a,b]'``, ``'["a","b"]'`` or ``'a,b'``."""
    text = text.strip()
    try:
        val = json.loads(text)
        if isinstance(val, list):
            return [str(v) for v in val]
    except json.JSONDecodeError:
        pass
    inner = text[1:-1] if text.startswith("[") and text.endswith("]") else text
    return [t.strip().strip("\"'") for t in inner.split(",") if t.strip()]


def parse_config(text: str, source: str = "<config>") -> LabConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, exc.lineno, exc.colno, source) from None
    loc = _Locator(text, source)
    if not isinstance(data, dict):
        raise ConfigError("top level must be an object", 1, 1, source)
    if set(data) >= {"config"} and isinstance(data["config"], dict):
        data = data["config"]  # a search hit: {"config": ..., "observed": ...}
    unknown = sorted(set(data) - _KEYS)
    if unknown:
        raise loc.error((unknown[0],), f"unknown key; allowed: {sorted(_KEYS)}")

    def guard(path, fn, *args):
        try:
            return fn(*args)
        except (ValueError, KeyError, TypeError, TopologyError, DomainError) as exc:
            msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
            raise loc.error(path, msg) from None

    domain = guard(("domain",), parse_domain, data["domain"]) if "domain" in data else _infer_domain(data)
    cfg = LabConfig(domain, raw=data)
    if "space" in data:
        cfg.space = guard(("space",), parse_space, data["space"])
    ideals = data.get("ideals", {})
    if not isinstance(ideals, dict):
        raise loc.error(("ideals",), "must be an object of named ideals")
    for name, spec in ideals.items():
        if not re.fullmatch(r"[A-Z][a-tv-z0-9_]*", name):
            raise loc.error(("ideals", name), "ideal names start with a capital and avoid 'u'")
        cfg.ideals[name] = guard(("ideals", name), parse_ideal, spec, domain, name)
    for key in ("function", "point", "set", "target"):
        if key in data and cfg.space is None:
            raise loc.error((key,), "needs a 'space'")
    if "function" in data:
        cfg.function = guard(("function",), _parse_function, data["function"], cfg.space, domain)
    if "point" in data:
        cfg.point = guard(("point",), cfg.space.index, data["point"])
    if "set" in data:
        cfg.set_mask = guard(("set",), _parse_set, data["set"], cfg.space)
    if "target" in data:
        cfg.target = guard(("target",), _parse_set, data["target"], cfg.space)
    if "mode" in data:
        if not isinstance(data["mode"], str):
            raise loc.error(("mode",), "mode must be a string")
        cfg.mode_text = data["mode"]
        guard(("mode",), parse_mode, cfg.mode_text, cfg.ideals)
    if "semantics" in data:
        if data["semantics"] not in ("trace", "padded"):
            raise loc.error(("semantics",), "semantics is 'trace' or 'padded'")
        cfg.semantics = data["semantics"]
    return cfg


def load_config(path: str) -> LabConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", source=path) from None
    return parse_config(text, path)
