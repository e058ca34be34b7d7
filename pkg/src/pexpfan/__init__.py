"""Exact arithmetic in the ring of integral piecewise exponential functions
on a rational fan, with GKM validation, equivariant Euler characteristics by
fixed-point localization, Kronecker duality pairings, and basis solvers."""

from .fan import Cone, Fan, SubdivisionMap, build_fan, resolve, star_quotient, stellar_subdivision
from .lattice import QuotientLattice, annihilator, dual_basis, primitive_vector, quotient_lattice, smith_normal_form
from .laurent import LaurentPoly, LocalizationSum, divide_exact, exact_div, reduce_localization
from .ktheory import (
    EPSILON,
    FixedPointData,
    PairingMatrix,
    chi,
    decompose,
    dual_basis_solve,
    euler_characteristic,
    gram_matrix,
    kronecker_pair,
    orbit_closure_class,
    tangent_weights,
)
from .pexp import (
    CartierData,
    GkmReport,
    GkmViolation,
    PiecewiseExponential,
    descend,
    from_cartier,
    gkm_validate,
    pullback,
)

__all__ = [
    "Cone", "Fan", "SubdivisionMap", "build_fan", "resolve", "star_quotient",
    "stellar_subdivision", "QuotientLattice", "annihilator", "dual_basis",
    "primitive_vector", "quotient_lattice", "smith_normal_form", "LaurentPoly",
    "LocalizationSum", "divide_exact", "exact_div", "reduce_localization",
    "EPSILON", "FixedPointData", "PairingMatrix", "chi", "decompose",
    "dual_basis_solve", "euler_characteristic", "gram_matrix", "kronecker_pair",
    "orbit_closure_class", "tangent_weights", "CartierData", "GkmReport",
    "GkmViolation", "PiecewiseExponential", "descend", "from_cartier",
    "gkm_validate", "pullback",
]
