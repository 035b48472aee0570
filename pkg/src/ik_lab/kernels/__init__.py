"""Hot bitmask kernels with a compiled backend and a pure-Python fallback.

The compiled extension ``_ckernels`` is used when it was built; set
``IK_LAB_PURE=1`` to force the Python implementation.  Both backends
expose the same functions and are tested against each other.
"""

from __future__ import annotations

import os

from . import _pykernels as python_backend

compiled_backend = None
if not os.environ.get("IK_LAB_PURE"):
    try:
        from . import _ckernels as compiled_backend  # type: ignore[no-redef]
    except ImportError:  # extension not built
        compiled_backend = None

_active = compiled_backend or python_backend

BACKEND: str = _active.BACKEND
MODES = _active.MODES
bad_mask = _active.bad_mask
oracle_bads = _active.oracle_bads
oracle_converges = _active.oracle_converges
cluster_search = _active.cluster_search
axiom_filter_topologies = _active.axiom_filter_topologies
sweep_agreement = _active.sweep_agreement
sweep_cluster = _active.sweep_cluster
mode_open_search = _active.mode_open_search


def available_backends() -> dict:
    out = {"python": python_backend}
    if compiled_backend is not None:
        out["cython"] = compiled_backend
    return out
