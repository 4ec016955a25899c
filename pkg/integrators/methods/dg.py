"""
Discrete gradient methods in skew form,

    x′ = x + h S̃(x, x′, h) ī¹(x, x′) ⋯ īᴹ(x, x′),

where S̃ = f̃ ∧ ĩ¹ ∧ ⋯ ∧ ĩᴹ / det(BᵀA) is antisymmetric, so every ī_m·(x′ − x)
vanishes and each I_m is conserved from one step to the next.

The contraction is computed three ways: the skew matrix for one integral,
the explicit double sum for two, and the Cramer reduction f̃ − A(BᵀA)⁻¹Bᵀf̃
for any number. The last can also materialize the tensor for small d.
"""

import enum
import typing as t
from dataclasses import dataclass, field, replace

import numpy as np
import numpy.typing as npt

from integrators.core.config import SolverConfig
from integrators.core.errors import ComplementarityFailure, DegenerateDenominator
from integrators.core.smalldense import (
    PIVOT_RTOL,
    WEDGE_MAX_DIMENSION,
    contract,
    determinant,
    projection_coefficients,
    wedge_tensor,
)
from integrators.core.solvers import SolveReport, solve
from integrators.core.systems import OdeSystem, StateVector
from integrators.utils.validations import ValidationError, validate_finite_vector

from .directions import DirectionRule, TwoPointVector, direction_matrix
from .directions import evaluate_two_point as evaluate
from .gradients import DiscreteGradientKind
from .steps import (
    IncrementRule,
    Predictor,
    StepResult,
    check_step_size,
    increment,
    preserved_integrals,
    vanishing,
)
from .underlying import OneStepMethod

DENOMINATOR_RTOL = 1e-13

Vector: t.TypeAlias = npt.NDArray[np.float64]


class Contraction(enum.StrEnum):
    SKEW_MATRIX = "skew"
    TWO_INTEGRAL = "two-integral"
    CRAMER = "cramer"


@dataclass(frozen=True)
class DgMethodSpec:
    """A discrete gradient method: f̃ from `underlying`, ĩ_m and ī_m per integral."""

    underlying: OneStepMethod
    directions: tuple[DirectionRule, ...]
    discrete_gradients: tuple[DiscreteGradientKind, ...]
    solver: SolverConfig = field(default_factory=SolverConfig)
    name: str = ""
    preserve: tuple[int, ...] | None = None
    increment: IncrementRule = IncrementRule.PREDICTOR
    contraction: Contraction = Contraction.CRAMER
    materialize_tensor: bool = False
    """Contract the explicit S̃ tensor instead of the Cramer reduction."""
    hat: TwoPointVector | None = None
    """î in the denominator î·ĭ of the single-integral S̃ (default ĩ)."""
    breve: TwoPointVector | None = None
    """ĭ in the denominator î·ĭ of the single-integral S̃ (default ī)."""

    def __post_init__(self):
        object.__setattr__(self, "directions", tuple(self.directions))
        object.__setattr__(self, "discrete_gradients", tuple(self.discrete_gradients))
        m = len(self.directions)
        if m < 1 or m != len(self.discrete_gradients):
            raise ValidationError(
                f"Need as many discrete gradients ({len(self.discrete_gradients)}) "
                f"as directions ({m}), at least one"
            )
        if self.increment == IncrementRule.SYMMETRIC:
            raise ValidationError("Discrete gradient methods take no symmetric f̃")
        if self.contraction == Contraction.SKEW_MATRIX and m != 1:
            raise ValidationError(f"The skew matrix form preserves 1 integral, not {m}")
        if self.contraction == Contraction.TWO_INTEGRAL and m != 2:
            raise ValidationError(f"The two-integral form needs 2 integrals, not {m}")
        if (self.hat or self.breve) and self.contraction != Contraction.SKEW_MATRIX:
            raise ValidationError("î and ĭ apply to the single-integral form only")
        if self.materialize_tensor and self.contraction != Contraction.CRAMER:
            raise ValidationError("Only the Cramer contraction materializes S̃")

    @property
    def n_integrals(self) -> int:
        """The number of preserved integrals."""
        return len(self.directions)


#
# Contractions
#


def skew_tensor(ftilde: t.Any, a: t.Any, b: t.Any) -> npt.NDArray[np.float64]:
    """
    Materialize S̃ = f̃ ∧ ĩ¹ ∧ ⋯ ∧ ĩᴹ / det(BᵀA), an antisymmetric array of
    shape (d,) * (M + 1). Only for d <= WEDGE_MAX_DIMENSION.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    gram = b.T @ a
    norm = determinant(gram)
    scale = float(np.max(np.abs(gram))) ** gram.shape[0]
    if not abs(norm) > PIVOT_RTOL * scale:
        raise ComplementarityFailure(abs(norm))
    return wedge_tensor(np.column_stack([ftilde, a])) / norm


def _skew_matrix(
    ftilde: Vector, itilde: Vector, ibar: Vector, ihat: Vector, ibreve: Vector
) -> tuple[Vector, Vector]:
    """S̃ī with S̃ = (f̃îᵀ − îf̃ᵀ)/(î·ĭ), and the coefficient of −î."""
    denominator = float(ihat @ ibreve)
    scale = float(np.linalg.norm(ihat) * np.linalg.norm(ibreve))
    if not abs(denominator) > DENOMINATOR_RTOL * scale:
        raise DegenerateDenominator(denominator, scale)
    coefficient = float(ftilde @ ibar) / denominator
    update = ftilde * (float(ihat @ ibar) / denominator) - coefficient * ihat
    return update, np.array([coefficient])


def _two_integral(
    ftilde: Vector, a: npt.NDArray[np.float64], b: npt.NDArray[np.float64]
) -> tuple[Vector, Vector]:
    """
    Σ_mn S̃_lmn ī_m j̄_n with S̃_lmn the determinant of rows l, m, n of
    [f̃ ĩ j̃] divided by Ñ = (ĩ·ī)(j̃·j̄) − (ĩ·j̄)(ī·j̃).
    """
    itilde, jtilde = a[:, 0], a[:, 1]
    ibar, jbar = b[:, 0], b[:, 1]
    i_f, i_i, i_j = ibar @ ftilde, ibar @ itilde, ibar @ jtilde
    j_f, j_i, j_j = jbar @ ftilde, jbar @ itilde, jbar @ jtilde
    norm = i_i * j_j - j_i * i_j
    scale = float(
        np.prod(np.linalg.norm(a, axis=0)) * np.prod(np.linalg.norm(b, axis=0))
    )
    if not abs(norm) > DENOMINATOR_RTOL * scale:
        raise DegenerateDenominator(norm, scale)
    # First-row expansion of the 3 × 3 determinant with rows [f̃_l ĩ_l j̃_l],
    # ī·[f̃ ĩ j̃] and j̄·[f̃ ĩ j̃].
    first = (i_f * j_j - i_j * j_f) / norm
    second = (i_i * j_f - j_i * i_f) / norm
    update = ftilde - first * itilde - second * jtilde
    return update, np.array([first, second])


def _cramer(
    ftilde: Vector,
    a: npt.NDArray[np.float64],
    b: npt.NDArray[np.float64],
    materialize: bool,
) -> tuple[Vector, Vector]:
    coefficients = projection_coefficients(ftilde, a, b)
    if materialize:
        columns = [b[:, m] for m in range(b.shape[1])]
        return contract(skew_tensor(ftilde, a, b), columns), coefficients
    return ftilde - a @ coefficients, coefficients


#
# Steps
#


def _dg_solve(spec: DgMethodSpec, system: OdeSystem, x: t.Any, h: float) -> StepResult:
    h = check_step_size(h)
    x = validate_finite_vector(x, system.dimension)
    m = spec.n_integrals
    integrals = preserved_integrals(system, spec.preserve, m)
    if spec.materialize_tensor and system.dimension > WEDGE_MAX_DIMENSION:
        raise ValidationError(
            f"Cannot materialize S̃ for d = {system.dimension} > {WEDGE_MAX_DIMENSION}"
        )
    gradients = np.column_stack([integral.gradient(x) for integral in integrals])
    if vanishing(gradients):
        # x is a critical point of every preserved integral.
        return StepResult(x, np.zeros(m), SolveReport(x, 0, 0.0, True), True)
    predictor = Predictor.evaluate(spec.underlying, system, x, h, spec.solver)

    def update(xp: Vector) -> tuple[Vector, Vector]:
        ftilde = increment(spec.increment, spec.underlying, system, x, xp, h, predictor)
        a = direction_matrix(spec.directions, integrals, x, xp, predictor.state)
        b = direction_matrix(spec.discrete_gradients, integrals, x, xp, predictor.state)
        match spec.contraction:
            case Contraction.SKEW_MATRIX:
                ihat = a[:, 0]
                if spec.hat is not None:
                    ihat = evaluate(spec.hat, integrals[0], x, xp, predictor.state)
                ibreve = b[:, 0]
                if spec.breve is not None:
                    ibreve = evaluate(spec.breve, integrals[0], x, xp, predictor.state)
                return _skew_matrix(ftilde, a[:, 0], b[:, 0], ihat, ibreve)
            case Contraction.TWO_INTEGRAL:
                return _two_integral(ftilde, a, b)
        return _cramer(ftilde, a, b, spec.materialize_tensor)

    def fixed_point_map(xp: Vector) -> Vector:
        return x + h * update(xp)[0]

    def residual(xp: Vector) -> Vector:
        return xp - fixed_point_map(xp)

    report = solve(spec.solver, predictor.state, residual, fixed_point_map)
    _, coefficients = update(report.solution)
    return StepResult(report.solution, -h * coefficients, report)


def dg_step_single(
    spec: DgMethodSpec, system: OdeSystem, x: t.Any, h: float
) -> StepResult:
    """
    x′ = x + h S̃ ī with S̃ = (f̃îᵀ − îf̃ᵀ)/(î·ĭ); x′ = x where ∇I(x) = 0.

    Raises DegenerateDenominator when î·ĭ is negligible.
    """
    if spec.contraction != Contraction.SKEW_MATRIX:
        spec = _with_contraction(spec, Contraction.SKEW_MATRIX)
    return _dg_solve(spec, system, x, h)


def dg_step_two_integrals(
    spec: DgMethodSpec, system: OdeSystem, x: t.Any, h: float
) -> StepResult:
    """The two-integral tensor form; raises DegenerateDenominator when Ñ ≈ 0."""
    if spec.contraction != Contraction.TWO_INTEGRAL:
        spec = _with_contraction(spec, Contraction.TWO_INTEGRAL)
    return _dg_solve(spec, system, x, h)


def dg_step_multi(
    spec: DgMethodSpec, system: OdeSystem, x: t.Any, h: float
) -> StepResult:
    """
    The general M-integral form through f̃ − A(BᵀA)⁻¹Bᵀf̃, or through the
    materialized tensor when `spec.materialize_tensor` is set.

    Raises ComplementarityFailure when BᵀA is singular.
    """
    if spec.contraction != Contraction.CRAMER:
        spec = _with_contraction(spec, Contraction.CRAMER)
    return _dg_solve(spec, system, x, h)


def dg_step(spec: DgMethodSpec, system: OdeSystem, x: t.Any, h: float) -> StepResult:
    """Step with the contraction `spec` names."""
    return _dg_solve(spec, system, x, h)


def _with_contraction(spec: DgMethodSpec, contraction: Contraction) -> DgMethodSpec:
    return replace(spec, contraction=contraction)
