"""Reachability analysis for max-plus linear systems.

Explicit reach sets over difference-bound matrices and a symbolic engine
based on difference-logic satisfiability, plus a benchmark harness.
"""

from .dbm import (
    Constraint,
    Dbm,
    DbmUnion,
    canonicalize,
    image_affine,
    intersect,
    parse_set,
    preimage_affine,
)
from .difflogic import DLVar, encode_bounded, encode_step
from .dlsolver import (
    ExternalContext,
    ResourceLimit,
    SatVerdict,
    SolverContext,
    check_external,
    solve,
    to_smtlib,
)
from .maxplus import (
    EPS,
    MaxPlusMatrix,
    SpectralProfile,
    completeness_threshold,
    eigenvalue,
    is_irreducible,
    mp_apply,
    mp_matmul,
    mp_power,
    parse_matrix,
    transient_cyclicity,
)
from .problem import ReachResult, ReachSpec, ReachTimeout
from .pwa import PwaRegion, PwaSystem, pwa_generate
from .reach_explicit import reach_explicit
from .reach_symbolic import reach_symbolic, verify_witness

__version__ = "0.1.0"
