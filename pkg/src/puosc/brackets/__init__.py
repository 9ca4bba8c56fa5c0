"""Exact phase-space algebra: brackets, constraints and canonical maps."""

from .canonical import (
    boundary_term_residual,
    generating_function_check,
    legendre_hamiltonian,
    ostrogradsky_momenta,
)
from .dirac import ConstraintSet, bracket_table, constraint_matrix, dirac_bracket, poisson_bracket
from .models import (
    ExtendedSystem,
    PUTransformation,
    equal_extended,
    pu_lagrangian,
    pu_transformation,
    unequal_extended,
)
from .poly import PhasePoly, PhaseSpace, jet_names, total_derivative

__all__ = [
    "ConstraintSet",
    "ExtendedSystem",
    "PUTransformation",
    "PhasePoly",
    "PhaseSpace",
    "boundary_term_residual",
    "bracket_table",
    "constraint_matrix",
    "dirac_bracket",
    "equal_extended",
    "generating_function_check",
    "jet_names",
    "legendre_hamiltonian",
    "ostrogradsky_momenta",
    "poisson_bracket",
    "pu_lagrangian",
    "pu_transformation",
    "total_derivative",
    "unequal_extended",
]
