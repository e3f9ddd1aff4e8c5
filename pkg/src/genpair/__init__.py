"""Exact solution of the separable pairing Hamiltonian ``H = G S+_0 S-_0``.

Spectra come from two independent routes: direct diagonalization in the
pair basis, and roots of the algebraic Bethe equations expanded back into
eigenvectors. ``genpair.spectrum`` compares them sector by sector.
"""

from .bethe_solver import RapiditySet, ZeroModeRoots, solve_lowest, solve_nonzero, solve_zero
from .model import ModelSpace, ShellLevel, builtin_model, validate_model
from .quasispin_oracle import commutator_check, diagonalize_sector
from .spectrum import compute_report, full_spectrum, reproduce_table

__all__ = [
    "ModelSpace",
    "RapiditySet",
    "ShellLevel",
    "ZeroModeRoots",
    "builtin_model",
    "commutator_check",
    "compute_report",
    "diagonalize_sector",
    "full_spectrum",
    "reproduce_table",
    "solve_lowest",
    "solve_nonzero",
    "solve_zero",
    "validate_model",
]
