"""``ik-lab`` command line.

Exit codes: ``check`` 0 converges / 1 does not / 2 config error;
``search`` 0 found / 3 exhausted; ``verify`` 0 iff no gating violation.
``open`` and ``sequential`` answer 0 yes / 1 no.  Every command prints
JSON (schema ``ik-lab/1``) on stdout; timings go to stderr so reports
stay byte-identical between runs.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from itertools import islice

from . import catalog, kernels
from .config import ConfigError, LabConfig, load_config, parse_ideal, parse_point_list, parse_space
from .convergence import Base, OracleBoundExceeded, Sup, decide, hit_set, limit_set, oracle, verify_section2
from .ideals import contains, is_proper, join
from .indexsets import OMEGA, DomainError
from .points import (
    RealizationError,
    Semantics,
    cluster_points,
    cluster_points_search,
    realize_cluster_set,
    verify_padded_closed_form,
    verify_section4,
)
from .report import SCHEMA, merge
from .search import SPACE_FILTERS, PredicateError, parse_predicate, run_search
from .seqspace import is_mode_open, mode_open_family, verify_section3
from .topology import enumerate_topologies, enumerate_topologies_bruteforce, is_open_set

EXIT_OK, EXIT_NO, EXIT_CONFIG, EXIT_EXHAUSTED = 0, 1, 2, 3
SUITES = ("s2", "s3", "s4", "padded", "all")


def _emit(obj: dict, args) -> None:
    text = json.dumps({"schema": SCHEMA, **obj}, indent=2, sort_keys=True)
    print(text)
    if getattr(args, "report", None):
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _config(args) -> LabConfig:
    if not args.config:
        raise ConfigError("this command needs --config FILE")
    return load_config(args.config)


def _semantics(args, cfg: LabConfig | None = None) -> Semantics:
    text = args.semantics or (cfg.semantics if cfg else None) or "trace"
    return Semantics(text)


# -- single-instance commands ----------------------------------------------


def cmd_check(args) -> int:
    cfg = _config(args)
    cfg.require("space", "function", "point")
    mode = cfg.mode(args.mode)
    try:
        verdict = oracle(cfg.function, cfg.point, mode, cfg.space) if args.oracle else decide(
            cfg.function, cfg.point, mode, cfg.space
        )
    except OracleBoundExceeded as exc:
        raise ConfigError(f"--oracle: {exc}") from None
    _emit(
        {"command": "check", "mode": args.mode or cfg.mode_text, "point": cfg.space.points[cfg.point], **verdict.to_json(cfg.space)},
        args,
    )
    return EXIT_OK if verdict.converges else EXIT_NO


def cmd_limits(args) -> int:
    cfg = _config(args)
    cfg.require("space", "function")
    mode = cfg.mode(args.mode)
    if args.oracle:
        try:
            lim = sum(1 << x for x in range(cfg.space.size) if oracle(cfg.function, x, mode, cfg.space).converges)
        except OracleBoundExceeded as exc:
            raise ConfigError(f"--oracle: {exc}") from None
    else:
        lim = limit_set(cfg.function, mode, cfg.space)
    _emit({"command": "limits", "mode": args.mode or cfg.mode_text, "limits": cfg.space.to_labels(lim)}, args)
    return EXIT_OK


def _pair(cfg: LabConfig):
    try:
        return cfg.ideals["I"], cfg.ideals["K"]
    except KeyError as exc:
        raise ConfigError(f"config needs ideal {exc.args[0]!r}") from None


def cmd_cluster(args) -> int:
    cfg = _config(args)
    cfg.require("space")
    i, k = _pair(cfg)
    sem = _semantics(args, cfg)
    space = cfg.space
    out: dict = {"command": "cluster", "semantics": sem.value}
    if cfg.target is not None:
        try:
            f = realize_cluster_set(space, cfg.target, i, k)
        except (RealizationError, DomainError) as exc:
            raise ConfigError(str(exc)) from None
        out["realized"] = f.to_json(space.points)
    else:
        cfg.require("function")
        f = cfg.function
    ik = join(i, k)
    rows = []
    for x in range(space.size):
        a = hit_set(f, space.min_nbhd[x])
        rows.append(
            {
                "point": space.points[x],
                "deciding_set": a.to_json(),
                "in_I": contains(i, a),
                "in_K": contains(k, a),
                "in_IuK": contains(ik, a) if is_proper(ik) else True,
            }
        )
    c = cluster_points(f, i, k, space, sem)
    out.update(points=rows, cluster_set=space.to_labels(c))
    if f.domain == OMEGA:
        out["limit_set"] = out["cluster_set"]
    if args.oracle:
        s = cluster_points_search(f, i, k, space, sem)
        out["search_cluster_set"] = space.to_labels(s)
        if s != c:
            _emit(out, args)
            return EXIT_NO
    _emit(out, args)
    return EXIT_OK


def _set_arg(args, cfg: LabConfig) -> int:
    if args.set is not None:
        try:
            return cfg.space.to_mask(parse_point_list(args.set))
        except KeyError as exc:
            raise ConfigError(f"--set: {exc.args[0]}") from None
    if cfg.set_mask is None:
        raise ConfigError("needs --set or a 'set' key")
    return cfg.set_mask


def _mode_or_pair(args, cfg: LabConfig):
    if args.mode or cfg.mode_text:
        return cfg.mode(args.mode)
    i, k = _pair(cfg)
    return Sup(i, Base(k))


def cmd_open(args) -> int:
    cfg = _config(args)
    cfg.require("space")
    o = _set_arg(args, cfg)
    verdict = is_mode_open(cfg.space, o, _mode_or_pair(args, cfg))
    _emit(
        {
            "command": "open",
            "set": cfg.space.to_labels(o),
            "open": is_open_set(cfg.space, o),
            **verdict.to_json(cfg.space),
        },
        args,
    )
    return EXIT_OK if verdict.is_mode_open else EXIT_NO


def cmd_sequential(args) -> int:
    if args.config:
        cfg = _config(args)
    else:
        if not (args.space and args.I and args.K):
            raise ConfigError("sequential needs --config or all of --space, --I, --K")
        try:
            space = parse_space(args.space)
            dom = OMEGA
            ideals = {"I": parse_ideal(args.I, dom, "I"), "K": parse_ideal(args.K, dom, "K")}
        except (ValueError, DomainError) as exc:
            raise ConfigError(str(exc)) from None
        cfg = LabConfig(dom, space, ideals)
    cfg.require("space")
    mode = _mode_or_pair(args, cfg)
    fam = mode_open_family(cfg.space, mode)
    seq = all(is_open_set(cfg.space, o) for o in fam)
    _emit(
        {
            "command": "sequential",
            "sequential": seq,
            "mode_opens": [cfg.space.to_labels(o) for o in fam],
            "opens": [cfg.space.to_labels(u) for u in cfg.space.opens],
        },
        args,
    )
    return EXIT_OK if seq else EXIT_NO


# -- batteries ----------------------------------------------------------------


def _timed(name: str, fn):
    t0 = time.perf_counter()
    out = fn()
    print(f"{name}: {time.perf_counter() - t0:.2f}s", file=sys.stderr)
    return out


def cmd_verify(args) -> int:
    bounds = args.bounds
    sem = _semantics(args)
    runners = {
        "s2": lambda: verify_section2(bounds),
        "s3": lambda: verify_section3(bounds),
        "s4": lambda: verify_section4(bounds, sem),
        "padded": lambda: verify_padded_closed_form(bounds.n or 5, bounds.k or 3),
    }
    names = ["s2", "s3", "s4", "padded"] if args.suite == "all" else [args.suite]
    reports = [_timed(n, runners[n]) for n in names]
    for r in reports:
        r.info.setdefault("backend", kernels.BACKEND)
    body = reports[0].to_json() if len(reports) == 1 else merge("all", reports)
    body.pop("schema", None)
    _emit({"command": "verify", **body}, args)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_NO


def cmd_search(args) -> int:
    pred = parse_predicate(args.predicate)
    hits = list(islice(run_search(pred, args.bounds, args.spaces), args.limit))
    for h in hits:
        print(json.dumps({"schema": SCHEMA, "predicate": str(pred), **h}, sort_keys=True))
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump({"schema": SCHEMA, "predicate": str(pred), "hits": hits}, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if not hits:
        print(json.dumps({"schema": SCHEMA, "predicate": str(pred), "exhausted": True}, sort_keys=True))
        return EXIT_EXHAUSTED
    return EXIT_OK


def cmd_enumerate(args) -> int:
    k = args.spaces
    spaces = list(enumerate_topologies(k))
    filtered = enumerate_topologies_bruteforce(k)
    agree = sorted(tuple(sorted(sp.opens)) for sp in spaces) == sorted(tuple(sorted(f)) for f in filtered)
    out = {"command": "enumerate", "k": k, "count": len(spaces), "axiom_filter": len(filtered), "agree": agree}
    if args.list:
        out["spaces"] = [sp.to_json() for sp in spaces]
    _emit(out, args)
    return EXIT_OK if agree else EXIT_NO


# -- argument parsing ---------------------------------------------------------


def _bounds(text: str) -> catalog.Bounds:
    try:
        return catalog.Bounds.parse(text)
    except catalog.BoundsError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="instance config (JSON)")
    common.add_argument("--mode", metavar="STR", help='convergence mode, e.g. "I^K", "(IuK)*", "I^(K^J)"')
    common.add_argument("--semantics", choices=[s.value for s in Semantics], help="cluster-point reading")
    common.add_argument("--bounds", type=_bounds, default=catalog.Bounds(), metavar="k=4,n=4,p=6")
    common.add_argument("--report", metavar="FILE", help="also write the JSON output here")
    common.add_argument("--oracle", action="store_true", help="use the definition-faithful evaluator")

    p = argparse.ArgumentParser(prog="ik-lab", description="Ideal-convergence lab for finite topological spaces.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="does f converge to the point?")
    sub.add_parser("limits", parents=[common], help="all limit points of f")
    sub.add_parser("cluster", parents=[common], help="cluster set of f (or realize a 'target')")
    so = sub.add_parser("open", parents=[common], help="is a set open for the mode?")
    so.add_argument("--set", help='point set, e.g. "[a]"')
    ss = sub.add_parser("sequential", parents=[common], help="is every mode-open set open?")
    ss.add_argument("--space", help="space builtin, e.g. sierpinski, chain:3")
    ss.add_argument("--I", help="ideal builtin for I")
    ss.add_argument("--K", help="ideal builtin for K")
    sv = sub.add_parser("verify", parents=[common], help="run theorem batteries")
    sv.add_argument("suite", choices=SUITES)
    sh = sub.add_parser("search", parents=[common], help="look for instances matching a predicate")
    sh.add_argument("predicate")
    sh.add_argument("--spaces", choices=SPACE_FILTERS, default="all", help="restrict the spaces searched")
    sh.add_argument("--limit", type=int, default=10, help="stop after this many hits")
    se = sub.add_parser("enumerate", parents=[common], help="count topologies on k points")
    se.add_argument("--spaces", type=int, required=True, metavar="K")
    se.add_argument("--list", action="store_true", help="include every space in the output")
    return p


COMMANDS = {
    "check": cmd_check,
    "limits": cmd_limits,
    "cluster": cmd_cluster,
    "open": cmd_open,
    "sequential": cmd_sequential,
    "verify": cmd_verify,
    "search": cmd_search,
    "enumerate": cmd_enumerate,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, PredicateError) as exc:
        print(f"ik-lab {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, DomainError) as exc:
        print(f"ik-lab {args.command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
