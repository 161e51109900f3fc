"""Conflict-free chromatic numbers of finite set systems."""

from .core import (
    ADParams,
    CFReport,
    EDDecomposition,
    PartialColoring,
    SetSystem,
    is_almost_disjoint,
    is_cf,
    is_transversal,
    is_weak_cf,
    is_witness,
    restrict,
    unique_color_set,
    verify_ed,
)
from .solver import (
    ExtensionProblem,
    SolveResult,
    brute_oracle,
    chi,
    chi_cf,
    export_cnf,
    feasible_cf,
    normalize_extension_witness,
    solve_chi,
    solve_chi_cf,
    solve_wchi_cf,
    wchi_cf,
)

__all__ = [
    "ADParams", "CFReport", "EDDecomposition", "PartialColoring", "SetSystem",
    "is_almost_disjoint", "is_cf", "is_transversal", "is_weak_cf", "is_witness",
    "restrict", "unique_color_set", "verify_ed",
    "ExtensionProblem", "SolveResult", "brute_oracle", "chi", "chi_cf", "export_cnf",
    "feasible_cf", "normalize_extension_witness", "solve_chi", "solve_chi_cf",
    "solve_wchi_cf", "wchi_cf",
]

__version__ = "0.1.0"
