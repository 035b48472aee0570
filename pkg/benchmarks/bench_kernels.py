"""Compiled vs pure-Python kernels on the hot sweeps.

    python benchmarks/bench_kernels.py [--repeat N]

Each row times one kernel call pattern on both backends and checks the
results agree.
"""

from __future__ import annotations

import argparse
import time

from ik_lab.catalog import spaces_upto
from ik_lab.ideals import enumerate_ideals_finite
from ik_lab.kernels import available_backends


def _cases():
    spaces3 = [sp for sp in spaces_upto(3) if sp.size == 3]
    masks4 = [i.grand_union.head for i in enumerate_ideals_finite(4)]
    pairs = [(gi, gk) for gi in masks4[::3] for gk in masks4[::3]]

    def agreement(b):
        return [b.sweep_agreement(sp.opens, sp.min_nbhd, 3, 4, gi, gk) for sp in spaces3 for gi, gk in pairs]

    def cluster(b):
        return [b.sweep_cluster(sp.opens, sp.min_nbhd, 3, 4, gi, gk) for sp in spaces3 for gi, gk in pairs]

    def topologies(b):
        return len(b.axiom_filter_topologies(4))

    table = bytes([1] * 30)
    sp4 = [sp for sp in spaces_upto(4) if sp.size == 4]

    def open_search(b):
        return [b.mode_open_search(sp.min_nbhd, 4, 0b0011, (1, 2, 3, 4), bytes(30)) for sp in sp4] + [
            b.mode_open_search(sp4[0].min_nbhd, 4, 0b0001, (1, 2, 3, 4), table)
        ]

    return {
        "sweep_agreement (3 pts, Finite(4))": agreement,
        "sweep_cluster (3 pts, Finite(4))": cluster,
        "axiom_filter_topologies(4)": topologies,
        "mode_open_search (4 pts)": open_search,
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=1)
    args = ap.parse_args()
    backends = available_backends()
    if "cython" not in backends:
        print("compiled backend not built; only timing the Python fallback")
    print(f"{'case':40s} " + " ".join(f"{name:>10s}" for name in backends) + "   speedup")
    for name, fn in _cases().items():
        times, results = {}, {}
        for bname, mod in backends.items():
            best = float("inf")
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                results[bname] = fn(mod)
                best = min(best, time.perf_counter() - t0)
            times[bname] = best
        if len({repr(r) for r in results.values()}) != 1:
            raise SystemExit(f"{name}: backends disagree")
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{name:40s} " + " ".join(f"{times[b]:9.3f}s" for b in backends) + f"   {speed:6.1f}x")


if __name__ == "__main__":
    main()
