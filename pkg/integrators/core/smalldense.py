"""
Small dense linear algebra for the projection and discrete gradient steps.

Everything here works on plain numpy arrays whose sizes are a few dozen at
most: d × M direction matrices, M × M Gram-like matrices BᵀA and the d × d
Jacobians of the per-step Newton solves.
"""

import itertools
import typing as t
import warnings

import numpy as np
import numpy.typing as npt
import scipy.linalg as la

from integrators.utils.validations import (
    DimensionMismatch,
    ValidationError,
    validate_matrix,
    validate_same_shape,
    validate_square,
)

from .errors import ComplementarityFailure, SingularMatrix

PIVOT_RTOL = 1e-13
"""A pivot below PIVOT_RTOL · max|entry| counts as zero."""

WEDGE_MAX_DIMENSION = 6
"""Largest d for which a wedge tensor (d ** K entries) is materialized."""

Matrix: t.TypeAlias = npt.NDArray[np.float64]
Vector: t.TypeAlias = npt.NDArray[np.float64]


class LUFactors(t.NamedTuple):
    lu: Matrix
    piv: npt.NDArray[np.int32]

    @property
    def pivots(self) -> Vector:
        """The diagonal of U."""
        return np.diag(self.lu)

    @property
    def sign(self) -> float:
        """The sign of the row permutation."""
        swaps = np.count_nonzero(self.piv != np.arange(self.piv.shape[0]))
        return -1.0 if swaps % 2 else 1.0


def lu_factor(m: t.Any) -> LUFactors:
    """LU-factorize a square matrix with partial pivoting."""
    m = validate_square(m)
    with warnings.catch_warnings():
        # scipy warns on exactly singular input; callers inspect the pivots.
        warnings.simplefilter("ignore", la.LinAlgWarning)
        lu, piv = la.lu_factor(m, check_finite=False)
    return LUFactors(lu, piv)


def _smallest_pivot(factors: LUFactors, m: Matrix) -> tuple[float, float]:
    scale = float(np.max(np.abs(m)))
    return float(np.min(np.abs(factors.pivots))), scale


def solve_square(m: t.Any, rhs: t.Any) -> Vector:
    """
    Solve m·v = rhs for square `m` by LU with partial pivoting. `rhs` may be
    a vector or a matrix of right-hand sides.

    Raises SingularMatrix (carrying the offending pivot magnitude) when a
    pivot is below PIVOT_RTOL relative to the largest entry of `m`.
    """
    m = validate_square(m)
    rhs = np.asarray(rhs, dtype=np.float64)
    if rhs.shape[0] != m.shape[0]:
        raise DimensionMismatch(m.shape[0], rhs.shape[0])
    factors = lu_factor(m)
    pivot, scale = _smallest_pivot(factors, m)
    if not pivot > PIVOT_RTOL * scale:
        raise SingularMatrix(pivot)
    return la.lu_solve((factors.lu, factors.piv), rhs, check_finite=False)


def determinant(m: t.Any) -> float:
    """Return det(m) from the pivot product and permutation sign of its LU."""
    factors = lu_factor(m)
    return factors.sign * float(np.prod(factors.pivots))


def _gram(a: Matrix, b: Matrix) -> Matrix:
    """Return BᵀA after checking the d × M shapes."""
    a = validate_matrix(a)
    b = validate_matrix(b)
    d, m = validate_same_shape(a, b)
    if m > d:
        raise ValidationError(f"Need M <= d, got M={m}, d={d}")
    return b.T @ a


def _solve_gram(gram: Matrix, rhs: t.Any) -> Matrix:
    try:
        return solve_square(gram, rhs)
    except SingularMatrix as e:
        raise ComplementarityFailure(e.pivot) from None


def oblique_projector(a: t.Any, b: t.Any) -> Matrix:
    """
    Return P = I − A(BᵀA)⁻¹Bᵀ, the projector with null(P) = span(A) and
    range(P) = span(B)⊥.

    Raises ComplementarityFailure when BᵀA is singular.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    gram = _gram(a, b)
    return np.eye(a.shape[0]) - a @ _solve_gram(gram, b.T)


def gram_solve(a: t.Any, b: t.Any, rhs: t.Any) -> Vector:
    """Return (BᵀA)⁻¹·rhs, raising ComplementarityFailure when BᵀA is singular."""
    gram = _gram(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))
    return _solve_gram(gram, rhs)


def projection_coefficients(ftilde: t.Any, a: t.Any, b: t.Any) -> Vector:
    """Return c = (BᵀA)⁻¹Bᵀf̃, the coefficients of the removed A-component."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    ftilde = np.asarray(ftilde, dtype=np.float64)
    if ftilde.shape != (a.shape[0],):
        raise DimensionMismatch(a.shape[0], ftilde.shape)
    return gram_solve(a, b, b.T @ ftilde)


def projected_vector_field(ftilde: t.Any, a: t.Any, b: t.Any) -> Vector:
    """Return P·f̃ computed as f̃ − A(BᵀA)⁻¹Bᵀf̃ without forming P."""
    a = np.asarray(a, dtype=np.float64)
    return np.asarray(ftilde, dtype=np.float64) - a @ projection_coefficients(
        ftilde, a, b
    )


def wedge_contract(u: t.Any, v: t.Any) -> float:
    """
    Return (u¹∧⋯∧uᴷ)_{j₁⋯j_K} v¹_{j₁}⋯vᴷ_{j_K} for the columns of U and V,
    which equals det(VᵀU).
    """
    u = validate_matrix(u)
    v = validate_matrix(v)
    d, k = validate_same_shape(u, v)
    if k > d:
        raise ValidationError(f"Need K <= d, got K={k}, d={d}")
    return determinant(v.T @ u)


def wedge_tensor(columns: t.Any) -> npt.NDArray[np.float64]:
    """
    Materialize u¹∧⋯∧uᴷ for the columns of a d × K matrix as an array of
    shape (d,) * K whose entry (j₁, …, j_K) is det(U[[j₁, …, j_K], :]).

    Only for d <= WEDGE_MAX_DIMENSION; the tensor has d ** K entries.
    """
    u = validate_matrix(columns)
    d, k = u.shape
    if d > WEDGE_MAX_DIMENSION:
        raise ValidationError(
            f"Refusing to materialize a wedge tensor with d={d} > "
            f"{WEDGE_MAX_DIMENSION}"
        )
    tensor = np.zeros((d,) * k)
    for index in itertools.permutations(range(d), k):
        # Repeated indices give two equal rows, hence zero.
        tensor[index] = np.linalg.det(u[list(index), :])
    return tensor


def contract(tensor: npt.NDArray[np.float64], vectors: t.Sequence[t.Any]) -> Vector:
    """
    Contract the trailing indices of `tensor` with `vectors` in order:
    out_j = T_{j j₁ ⋯ j_M} v¹_{j₁} ⋯ vᴹ_{j_M}.
    """
    if tensor.ndim != len(vectors) + 1:
        raise DimensionMismatch(len(vectors) + 1, tensor.ndim)
    result = tensor
    for vector in reversed(vectors):
        result = result @ np.asarray(vector, dtype=np.float64)
    return result
