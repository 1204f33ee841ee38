"""Exact arithmetic tower: Q / Q(zeta_p) scalars, sparse polynomials,
normalized rational functions, substitutions and dense matrices."""

from .scalar import Cyclotomic, FieldMismatchError, QQ, is_prime, mpq, promote, scalar_arith, zeta
from .variables import register, var_index, var_name
from .poly import Poly
from .gcd import poly_gcd, poly_gcd_list, poly_lcm
from .ratfunc import RatFunc, Substitution, ZeroDenominatorError, ratfunc_normalize, substitute
from .matrix import (
    DimensionError,
    Matrix,
    SingularMatrixError,
    SymMatrix,
    char_poly,
    charpoly_coeffs,
    det_cofactor,
    det_fraction_free,
    eval_poly_at_matrix,
    first_difference,
    mat_arith,
    mat_inverse,
    matmul,
)


def poly_arith(f: Poly, g: Poly, op: str) -> Poly:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown polynomial op {op!r}")
