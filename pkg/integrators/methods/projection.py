"""
Linear projection methods.

Given x and h, find x′ and λ ∈ ℝᴹ with

    x′ = x + h f̃(x, x′, h) + A(x, x′, h) λ,    I_m(x′) = target_m,

where A = [ĩ¹ ⋯ ĩᴹ] holds the direction vectors. The same step can be
written without λ as x′ = x + h P f̃ + A(BᵀA)⁻¹Δ, with P = I − A(BᵀA)⁻¹Bᵀ,
B = [ī¹ ⋯ īᴹ] any discrete gradients and Δ_m = target_m − I_m(x); when
the targets are the current values this is the discrete gradient method
x′ = x + h S̃ ī¹ ⋯ īᴹ of `integrators.methods.dg`.
"""

import enum
import logging
import typing as t
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from integrators.core.config import SolverConfig
from integrators.core.smalldense import gram_solve
from integrators.core.solvers import solve
from integrators.core.systems import FirstIntegral, OdeSystem, StateVector
from integrators.utils.validations import ValidationError, validate_finite_vector

from .dg import Contraction, DgMethodSpec, dg_step, dg_step_single
from .directions import DirectionRule, direction_matrix
from .gradients import DiscreteGradientKind
from .steps import (
    ConserveAgainst,
    IncrementRule,
    Predictor,
    StepResult,
    check_step_size,
    increment,
    preserved_integrals,
    vanishing,
)
from .underlying import OneStepMethod, two_point_increment

logger = logging.getLogger(__name__)

Vector: t.TypeAlias = npt.NDArray[np.float64]


class Formulation(enum.StrEnum):
    LAMBDA = "lambda"
    """Solve for (x′, λ) jointly."""

    PROJECTOR = "projector"
    """Solve x′ = x + h P f̃ + A(BᵀA)⁻¹Δ for x′ alone."""

    DISCRETE_GRADIENT = "discrete-gradient"
    """Solve x′ = x + h S̃ ī¹ ⋯ īᴹ; conserves the previous step's values."""


class StandardVersion(enum.StrEnum):
    V1_AT_NEW = "v1"
    V2_AT_PREDICTOR = "v2"


class DahlbyVariant(enum.StrEnum):
    PREDICTOR_DIFFERENCE = "predictor-difference"
    """x′ = x + P(Φ_h(x) − x)."""

    PROJECTED_RHS = "projected-rhs"
    """x′ = x + h P g̃(x, x′, h)."""


@dataclass(frozen=True)
class MethodSpec:
    """A complete projection integrator."""

    underlying: OneStepMethod
    directions: tuple[DirectionRule, ...] = ()
    """One rule per preserved integral; empty runs the underlying method."""
    formulation: Formulation = Formulation.LAMBDA
    discrete_gradient: DiscreteGradientKind = field(
        default_factory=DiscreteGradientKind.gonzalez
    )
    """The ī_m forming B in the projector and discrete gradient forms."""
    conserve_against: ConserveAgainst = ConserveAgainst.INITIAL
    solver: SolverConfig = field(default_factory=SolverConfig)
    name: str = ""
    preserve: tuple[int, ...] | None = None
    """Indices of the system's integrals the directions refer to."""
    increment: IncrementRule = IncrementRule.PREDICTOR
    elimination_gradient: DiscreteGradientKind = field(
        default_factory=DiscreteGradientKind.gonzalez
    )
    """Eliminates λ when the LAMBDA form runs under the fixed-point strategy."""

    def __post_init__(self):
        object.__setattr__(self, "directions", tuple(self.directions))
        if self.preserve is not None:
            object.__setattr__(self, "preserve", tuple(self.preserve))
        if (
            self.increment == IncrementRule.SYMMETRIC
            and self.formulation != Formulation.LAMBDA
        ):
            raise ValidationError("The symmetric increment needs the lambda form")
        if self.increment == IncrementRule.SYMMETRIC and self.underlying.is_explicit:
            raise ValidationError("The symmetric increment needs a two-point method")
        if self.formulation == Formulation.DISCRETE_GRADIENT:
            if self.conserve_against != ConserveAgainst.PREVIOUS:
                raise ValidationError(
                    "The discrete gradient form conserves against the previous step"
                )
            if not self.directions:
                raise ValidationError("The discrete gradient form needs directions")

    @property
    def n_integrals(self) -> int:
        """The number of preserved integrals."""
        return len(self.directions)

    def as_dg_spec(self, kind: DiscreteGradientKind | None = None) -> DgMethodSpec:
        """The equivalent discrete gradient method with ī_m of `kind`."""
        kind = kind or self.discrete_gradient
        m = self.n_integrals
        return DgMethodSpec(
            underlying=self.underlying,
            directions=self.directions,
            discrete_gradients=(kind,) * m,
            solver=self.solver,
            name=self.name,
            preserve=self.preserve,
            increment=self.increment,
            contraction=Contraction.SKEW_MATRIX if m == 1 else Contraction.CRAMER,
        )


def conservation_targets(
    spec: MethodSpec, system: OdeSystem, x: StateVector, x0: StateVector
) -> Vector:
    """The values each step must hit: I_m(x₀) or I_m(x) per `conserve_against`."""
    integrals = preserved_integrals(system, spec.preserve, spec.n_integrals)
    source = x0 if spec.conserve_against == ConserveAgainst.INITIAL else x
    return _values(integrals, np.asarray(source, dtype=np.float64))


def _values(integrals: t.Sequence[FirstIntegral], x: Vector) -> Vector:
    return np.array([integral(x) for integral in integrals], dtype=np.float64)


def _eliminate(
    ftilde: Vector, a: Vector, b: Vector, delta: Vector, h: float
) -> Vector:
    """λ = (BᵀA)⁻¹(Δ − hBᵀf̃), which makes Bᵀ(x′ − x) = Δ."""
    return gram_solve(a, b, delta - h * (b.T @ ftilde))


def projection_step(
    spec: MethodSpec,
    system: OdeSystem,
    x: t.Any,
    h: float,
    targets: t.Any = None,
) -> StepResult:
    """
    Advance x by one step of `spec`, hitting `targets` (default: the
    preserved integrals at x).

    If every direction vanishes at (x, Φ_h(x)) the predictor is returned
    with λ = 0 and `degenerate` set.

    Raises SolverDiverged, ComplementarityFailure or DimensionMismatch.
    """
    h = check_step_size(h)
    x = validate_finite_vector(x, system.dimension)
    m = spec.n_integrals
    integrals = preserved_integrals(system, spec.preserve, m)
    if spec.formulation == Formulation.DISCRETE_GRADIENT:
        return dg_step(spec.as_dg_spec(), system, x, h)
    targets = (
        _values(integrals, x)
        if targets is None
        else validate_finite_vector(targets, m)
    )
    predictor = Predictor.evaluate(spec.underlying, system, x, h, spec.solver)
    if m == 0:
        return StepResult(predictor.state, np.zeros(0), predictor.trivial_report())
    initial = direction_matrix(
        spec.directions, integrals, x, predictor.state, predictor.state
    )
    if vanishing(initial):
        logger.debug("directions vanish at %s; taking the predictor", x)
        return StepResult(
            predictor.state, np.zeros(m), predictor.trivial_report(), True
        )
    if spec.formulation == Formulation.LAMBDA:
        return _lambda_step(spec, system, integrals, x, h, targets, predictor)
    return _projector_step(spec, system, integrals, x, h, targets, predictor)


def _lambda_step(
    spec: MethodSpec,
    system: OdeSystem,
    integrals: tuple[FirstIntegral, ...],
    x: Vector,
    h: float,
    targets: Vector,
    predictor: Predictor,
) -> StepResult:
    d, m = system.dimension, len(integrals)
    delta = targets - _values(integrals, x)
    gradients_at_x = np.column_stack([integral.gradient(x) for integral in integrals])
    eliminators = (spec.elimination_gradient,) * m

    def parts(xp: Vector, lam: Vector) -> tuple[Vector, Vector]:
        a = direction_matrix(spec.directions, integrals, x, xp, predictor.state)
        if spec.increment == IncrementRule.SYMMETRIC:
            gradients_at_xp = np.column_stack(
                [integral.gradient(xp) for integral in integrals]
            )
            ftilde = two_point_increment(
                spec.underlying,
                system.f,
                x + 0.5 * (gradients_at_x @ lam),
                xp - 0.5 * (gradients_at_xp @ lam),
                h,
            )
        else:
            ftilde = increment(
                spec.increment, spec.underlying, system, x, xp, h, predictor
            )
        return ftilde, a

    def residual(u: Vector) -> Vector:
        xp, lam = u[:d], u[d:]
        ftilde, a = parts(xp, lam)
        return np.concatenate(
            [xp - x - h * ftilde - a @ lam, _values(integrals, xp) - targets]
        )

    def fixed_point_map(u: Vector) -> Vector:
        xp, lam = u[:d], u[d:]
        ftilde, a = parts(xp, lam)
        b = direction_matrix(eliminators, integrals, x, xp, predictor.state)
        lam = _eliminate(ftilde, a, b, delta, h)
        return np.concatenate([x + h * ftilde + a @ lam, lam])

    start = np.concatenate([predictor.state, np.zeros(m)])
    report = solve(spec.solver, start, residual, fixed_point_map)
    return StepResult(report.solution[:d], report.solution[d:], report)


def _projector_step(
    spec: MethodSpec,
    system: OdeSystem,
    integrals: tuple[FirstIntegral, ...],
    x: Vector,
    h: float,
    targets: Vector,
    predictor: Predictor,
) -> StepResult:
    delta = targets - _values(integrals, x)
    gradients = (spec.discrete_gradient,) * len(integrals)

    def multipliers(xp: Vector) -> tuple[Vector, Vector, Vector]:
        ftilde = increment(spec.increment, spec.underlying, system, x, xp, h, predictor)
        a = direction_matrix(spec.directions, integrals, x, xp, predictor.state)
        b = direction_matrix(gradients, integrals, x, xp, predictor.state)
        return ftilde, a, _eliminate(ftilde, a, b, delta, h)

    def fixed_point_map(xp: Vector) -> Vector:
        ftilde, a, lam = multipliers(xp)
        return x + h * ftilde + a @ lam

    def residual(xp: Vector) -> Vector:
        return xp - fixed_point_map(xp)

    report = solve(spec.solver, predictor.state, residual, fixed_point_map)
    _, _, lam = multipliers(report.solution)
    return StepResult(report.solution, lam, report)


def single_integral_step_dg_form(
    spec: MethodSpec,
    system: OdeSystem,
    x: t.Any,
    h: float,
    dg: DiscreteGradientKind,
) -> StepResult:
    """
    The single-integral step written as x′ = x + h S̃ ī with
    S̃ = (f̃ĩᵀ − ĩf̃ᵀ)/(ĩ·ī). Conserves I(x).

    Raises DegenerateDenominator when ĩ·ī is negligible.
    """
    if spec.n_integrals != 1:
        raise ValidationError(
            f"The single-integral form preserves one integral, not {spec.n_integrals}"
        )
    return dg_step_single(spec.as_dg_spec(dg), system, x, h)


#
# Presets
#


def make_standard_projection(
    underlying: OneStepMethod,
    version: StandardVersion = StandardVersion.V1_AT_NEW,
    n_integrals: int = 1,
    **options,
) -> MethodSpec:
    """
    The standard projection: project the frozen predictor Φ_h(x) along
    i_m(x′) (V1) or i_m(Φ_h(x)) (V2).
    """
    rule = (
        DirectionRule.at_new()
        if version == StandardVersion.V1_AT_NEW
        else DirectionRule.at_predictor()
    )
    return MethodSpec(
        underlying=underlying,
        directions=(rule,) * n_integrals,
        increment=IncrementRule.PREDICTOR,
        **{"name": f"std-{version}", **options},
    )


def make_symmetric_projection(
    symmetric_underlying: OneStepMethod, n_integrals: int = 1, **options
) -> MethodSpec:
    """
    The symmetric projection y = x + ½A″λ, z = y + h g̃(y, z, h),
    x′ = z + ½A′λ, solved for (x′, λ) as one system.
    """
    if not symmetric_underlying.is_symmetric:
        raise ValidationError(
            f"{symmetric_underlying.name} is not a symmetric one-step method"
        )
    return MethodSpec(
        underlying=symmetric_underlying,
        directions=(DirectionRule.midpoint(),) * n_integrals,
        increment=IncrementRule.SYMMETRIC,
        **{"name": "symmetric", **options},
    )


def make_dahlby(
    variant: DahlbyVariant,
    underlying: OneStepMethod,
    dg: DiscreteGradientKind,
    n_integrals: int = 1,
    **options,
) -> MethodSpec:
    """
    Orthogonal projection with B = A = [ī¹ ⋯ īᴹ]: either of the predictor
    difference Φ_h(x) − x or of h g̃(x, x′, h).
    """
    rule = (
        IncrementRule.PREDICTOR
        if variant == DahlbyVariant.PREDICTOR_DIFFERENCE
        else IncrementRule.TWO_POINT
    )
    return MethodSpec(
        underlying=underlying,
        directions=(DirectionRule.from_discrete_gradient(dg),) * n_integrals,
        formulation=Formulation.PROJECTOR,
        discrete_gradient=dg,
        increment=rule,
        **{"name": f"dahlby-{variant}", **options},
    )
