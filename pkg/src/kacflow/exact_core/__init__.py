"""Exact arithmetic substrate: rationals, sparse polynomials, polynomial matrices."""
from .linalg import (
    DEFAULT_SEED,
    ExactSolution,
    det_cofactor,
    det_fraction_free,
    det_rational,
    nullspace,
    random_rational,
    rank_at_points,
    rank_rational,
    rref,
    sample_assignments,
    solve_exact,
)
from .matrix import PolyMatrix, kron, rational_matrix
from .poly import MultiPoly, Rational, as_poly, parse_poly, poly_eval, reduce_radicals, var_key
from .quadext import QuadExtElem

__all__ = [
    "DEFAULT_SEED", "ExactSolution", "MultiPoly", "PolyMatrix", "QuadExtElem", "Rational",
    "as_poly", "det_cofactor", "det_fraction_free", "det_rational", "kron", "nullspace",
    "parse_poly", "poly_eval", "random_rational", "rank_at_points", "rank_rational",
    "rational_matrix", "reduce_radicals", "rref", "sample_assignments", "solve_exact", "var_key",
]
