"""Consistency checks and general solutions for the Sylvester-type systems."""

from .primitives import solve_ax_yb, solve_axb, solve_quad, solve_two_term
from .system import EQUATIONS, UNKNOWNS, VARIANTS, SystemSpec, coefficient_names, rhs_names, slot_names, verify
from .systems import (
    auxiliary_tensors,
    check,
    check_eta,
    check_full,
    check_reduced,
    solve,
    solve_eta,
    solve_eta_cached,
    solve_full,
    solve_or_raise,
    solve_reduced,
)
from .types import (
    DEFAULT_TOL,
    Condition,
    ConsistencyReport,
    DerivationCache,
    FreeParams,
    Solution,
    Tolerances,
)

__all__ = [
    "Condition",
    "ConsistencyReport",
    "DEFAULT_TOL",
    "DerivationCache",
    "EQUATIONS",
    "FreeParams",
    "Solution",
    "SystemSpec",
    "Tolerances",
    "UNKNOWNS",
    "VARIANTS",
    "auxiliary_tensors",
    "check",
    "check_eta",
    "check_full",
    "check_reduced",
    "coefficient_names",
    "rhs_names",
    "slot_names",
    "solve",
    "solve_ax_yb",
    "solve_axb",
    "solve_eta",
    "solve_eta_cached",
    "solve_full",
    "solve_quad",
    "solve_or_raise",
    "solve_reduced",
    "solve_two_term",
    "verify",
]
