"""Exact-arithmetic solver for degree-bounded survivable network design.

Find a minimum-cost edge subset providing rho(u, v) edge-disjoint paths for
every required pair while respecting per-vertex degree bounds.  The solver
iteratively rounds vertex optima of the cut LP relaxation; the result costs
at most twice the LP value and each degree-constrained vertex ends with
degree at most 2 b(v) + 2.  All arithmetic is exact rational.
"""

from .instance import (
    Cut,
    Edge,
    GenerationError,
    Instance,
    InstanceError,
    ParseError,
    cut_requirement,
    gen_fixture,
    gen_random,
    parse_instance,
    serialize_instance,
)
from .cuts import CapGraph, Violation, find_violated_cut, is_feasible, lp_feasible, max_flow
from .rational import Rat, rat_str
from .ratlp import LpProblem, Row, Status, solve_restricted, verify_vertex
from .rounding import (
    CaseKind,
    InvariantBreach,
    LpInfeasibleError,
    RoundingCase,
    RoundingState,
    Solution,
    VertexStructureError,
    classify,
    initial_state,
    solve,
    solve_cut_lp,
)
from .verify import audit, brute_force_opt, check_guarantee

__version__ = "0.1.0"

__all__ = [
    "CapGraph",
    "CaseKind",
    "Cut",
    "Edge",
    "GenerationError",
    "Instance",
    "InstanceError",
    "InvariantBreach",
    "LpInfeasibleError",
    "LpProblem",
    "ParseError",
    "Rat",
    "RoundingCase",
    "RoundingState",
    "Row",
    "Solution",
    "Status",
    "VertexStructureError",
    "Violation",
    "audit",
    "brute_force_opt",
    "check_guarantee",
    "classify",
    "cut_requirement",
    "find_violated_cut",
    "gen_fixture",
    "gen_random",
    "initial_state",
    "is_feasible",
    "lp_feasible",
    "max_flow",
    "parse_instance",
    "rat_str",
    "serialize_instance",
    "solve",
    "solve_cut_lp",
    "solve_restricted",
    "verify_vertex",
]
