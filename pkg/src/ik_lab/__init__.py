"""Ideal convergence (I, I*, I^K, ...) on finite topological spaces.

Exact decision procedures over eventually periodic index sets, with a
definition-faithful oracle for cross-checking and exhaustive theorem
batteries.  See the ``ik-lab`` command for the scripted surface.
"""

from .convergence import Base, FunctionSeq, Sup, Verdict, decide, oracle, parse_mode
from .ideals import FIN, Ideal, generated, principal
from .indexsets import OMEGA, EpSet, Finite
from .kernels import BACKEND
from .points import Semantics, cluster_points, limit_points, realize_cluster_set
from .seqspace import is_mode_open, is_sequential
from .topology import FiniteSpace, mk_space

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Base",
    "EpSet",
    "FIN",
    "Finite",
    "FiniteSpace",
    "FunctionSeq",
    "Ideal",
    "OMEGA",
    "Semantics",
    "Sup",
    "Verdict",
    "cluster_points",
    "decide",
    "generated",
    "is_mode_open",
    "is_sequential",
    "limit_points",
    "mk_space",
    "oracle",
    "parse_mode",
    "principal",
    "realize_cluster_set",
]
