"""Pieces shared by the projection and discrete gradient step functions."""

import enum
import typing as t
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from integrators.core.config import SolverConfig
from integrators.core.solvers import SolveReport
from integrators.core.systems import FirstIntegral, OdeSystem, StateVector
from integrators.utils.validations import ValidationError, validate_finite

from .underlying import OneStepMethod, rk_increment, two_point_increment

DEGENERATE_DIRECTION = 1e-14
"""Direction matrices with |A|∞ below this are treated as vanishing."""


class IncrementRule(enum.StrEnum):
    """How f̃(x, x′, h) is obtained from the underlying method."""

    PREDICTOR = "predictor"
    """f̃ = (Φ_h(x) − x)/h, computed once and frozen for the step."""

    TWO_POINT = "two-point"
    """f̃ = g̃(x, x′, h)."""

    SYMMETRIC = "symmetric"
    """f̃ = g̃(x + ½A″λ, x′ − ½A′λ, h), A″ and A′ the gradients at x and x′."""


class ConserveAgainst(enum.StrEnum):
    INITIAL = "initial"
    PREVIOUS = "previous"


@dataclass(frozen=True)
class StepResult:
    """One accepted step x ↦ x′."""

    x_new: StateVector
    lam: npt.NDArray[np.float64]
    solver_report: SolveReport
    degenerate: bool = False
    """True when the directions vanished and no correction was applied."""

    @property
    def lambda_norm(self) -> float:
        """|λ|∞, or 0 for an unprojected step."""
        return float(np.max(np.abs(self.lam))) if self.lam.size else 0.0


@dataclass(frozen=True)
class Predictor:
    """Φ_h(x) = x + h·increment, evaluated once per step."""

    state: StateVector
    increment: StateVector
    report: SolveReport | None

    @classmethod
    def evaluate(
        cls,
        method: OneStepMethod,
        system: OdeSystem,
        x: StateVector,
        h: float,
        solver: SolverConfig,
    ) -> "Predictor":
        """Run the underlying method once from x."""
        increment, report = rk_increment(method, system.f, x, h, solver)
        return cls(x + h * increment, increment, report)

    def trivial_report(self) -> SolveReport:
        """The report of a step that needed no solve beyond the predictor."""
        if self.report is not None:
            return self.report
        return SolveReport(self.state, 0, 0.0, True)


def check_step_size(h: t.Any) -> float:
    """Any finite h is allowed; negative values step backwards."""
    return validate_finite(h, "h")


def preserved_integrals(
    system: OdeSystem, preserve: t.Sequence[int] | None, count: int
) -> tuple[FirstIntegral, ...]:
    """
    Return the integrals a spec with `count` direction rules refers to: those
    at `preserve`, or the first `count` when `preserve` is None.
    """
    indices = tuple(range(count)) if preserve is None else tuple(preserve)
    if len(indices) != count:
        raise ValidationError(
            f"{count} direction rules but {len(indices)} preserved integrals"
        )
    return system.select(indices).integrals


def increment(
    rule: IncrementRule,
    method: OneStepMethod,
    system: OdeSystem,
    x: StateVector,
    xp: StateVector,
    h: float,
    predictor: Predictor,
) -> StateVector:
    """f̃(x, x′, h) for the PREDICTOR and TWO_POINT rules."""
    if rule == IncrementRule.PREDICTOR:
        return predictor.increment
    if rule == IncrementRule.TWO_POINT:
        return two_point_increment(method, system.f, x, xp, h)
    raise ValidationError(f"{rule} increments need the multipliers")


def vanishing(a: npt.NDArray[np.float64]) -> bool:
    return a.size == 0 or float(np.max(np.abs(a))) < DEGENERATE_DIRECTION
