"""
Underlying one-step methods x ↦ y = x + h·g̃.

These do not preserve anything; the projection and discrete gradient
methods use them to supply the increment g̃ (also written f̃).
"""

import enum
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from integrators.core.config import SolverConfig
from integrators.core.solvers import SolveReport, solve
from integrators.core.systems import StateVector, VectorField
from integrators.utils.validations import (
    ValidationError,
    validate_finite,
    validate_matrix,
)

CONSISTENCY_TOLERANCE = 1e-14


@dataclass(frozen=True)
class ButcherTableau:
    """The (a, b) coefficients of a Runge–Kutta method; c is derived."""

    a: npt.NDArray[np.float64]
    b: npt.NDArray[np.float64]
    order: int
    name: str

    def __post_init__(self):
        a = validate_matrix(self.a)
        b = np.asarray(self.b, dtype=np.float64)
        if a.shape != (b.shape[0], b.shape[0]):
            raise ValidationError(
                f"{self.name}: a has shape {a.shape} for {b.shape[0]} weights"
            )
        if abs(float(np.sum(b)) - 1.0) > CONSISTENCY_TOLERANCE:
            raise ValidationError(f"{self.name}: weights sum to {np.sum(b)}, not 1")
        a.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def stages(self) -> int:
        """The number of stages s."""
        return self.b.shape[0]

    @property
    def c(self) -> npt.NDArray[np.float64]:
        """The nodes c_i = Σ_j a_ij."""
        return self.a.sum(axis=1)

    @property
    def is_explicit(self) -> bool:
        """True when a is strictly lower triangular."""
        return bool(np.all(np.triu(self.a) == 0.0))


#
# Tableaux
#


def rk4_tableau() -> ButcherTableau:
    """The classical four-stage, fourth-order explicit method."""
    return ButcherTableau(
        np.array(
            [
                [0.0, 0.0, 0.0, 0.0],
                [1 / 2, 0.0, 0.0, 0.0],
                [0.0, 1 / 2, 0.0, 0.0],
                [0.0, 0.0, 1.0, 0.0],
            ]
        ),
        np.array([1 / 6, 1 / 3, 1 / 3, 1 / 6]),
        order=4,
        name="RK4",
    )


def rk6_tableau() -> ButcherTableau:
    """A seven-stage, sixth-order explicit method."""
    return ButcherTableau(
        np.array(
            [
                [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
                [1 / 3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
                [0.0, 2 / 3, 0.0, 0.0, 0.0, 0.0, 0.0],
                [1 / 12, 1 / 3, -1 / 12, 0.0, 0.0, 0.0, 0.0],
                [25 / 48, -55 / 24, 35 / 48, 15 / 8, 0.0, 0.0, 0.0],
                [3 / 20, -11 / 24, -1 / 8, 1 / 2, 1 / 10, 0.0, 0.0],
                [-261 / 260, 33 / 13, 43 / 156, -118 / 39, 32 / 195, 80 / 39, 0.0],
            ]
        ),
        np.array([13 / 200, 0.0, 11 / 40, 11 / 40, 4 / 25, 4 / 25, 13 / 200]),
        order=6,
        name="RK6",
    )


def explicit_euler_tableau() -> ButcherTableau:
    return ButcherTableau(np.array([[0.0]]), np.array([1.0]), order=1, name="Euler")


#
# One-step methods
#


class MethodKind(enum.StrEnum):
    EXPLICIT_RK = "explicit-rk"
    IMPLICIT_MIDPOINT = "implicit-midpoint"
    EXPLICIT_EULER = "explicit-euler"


@dataclass(frozen=True)
class OneStepMethod:
    """An underlying method: an explicit tableau or the implicit midpoint rule."""

    kind: MethodKind
    order: int
    tableau: ButcherTableau | None = None

    def __post_init__(self):
        if self.kind != MethodKind.IMPLICIT_MIDPOINT:
            if self.tableau is None or not self.tableau.is_explicit:
                raise ValidationError(f"{self.kind} needs an explicit tableau")

    @property
    def name(self) -> str:
        """The tableau name, or the kind for methods without one."""
        if self.tableau is not None:
            return self.tableau.name
        return "midpoint"

    @property
    def is_explicit(self) -> bool:
        """False only for the implicit midpoint rule."""
        return self.kind != MethodKind.IMPLICIT_MIDPOINT

    @property
    def is_symmetric(self) -> bool:
        """True when Φ_{−h} inverts Φ_h."""
        return self.kind == MethodKind.IMPLICIT_MIDPOINT

    @classmethod
    def rk4(cls) -> "OneStepMethod":
        """The classical fourth order Runge–Kutta method."""
        return cls(MethodKind.EXPLICIT_RK, 4, rk4_tableau())

    @classmethod
    def rk6(cls) -> "OneStepMethod":
        """Butcher's seven stage sixth order method."""
        return cls(MethodKind.EXPLICIT_RK, 6, rk6_tableau())

    @classmethod
    def explicit_euler(cls) -> "OneStepMethod":
        """Forward Euler."""
        return cls(MethodKind.EXPLICIT_EULER, 1, explicit_euler_tableau())

    @classmethod
    def implicit_midpoint(cls) -> "OneStepMethod":
        """y = x + h f((x + y)/2)."""
        return cls(MethodKind.IMPLICIT_MIDPOINT, 2)


def _explicit_increment(
    tableau: ButcherTableau, f: VectorField, x: StateVector, h: float
) -> StateVector:
    """Σ b_i k_i with k_i = f(x + h Σ_j a_ij k_j)."""
    k = np.zeros((tableau.stages, x.shape[0]))
    for i in range(tableau.stages):
        k[i] = f(x + h * (tableau.a[i, :i] @ k[:i]))
    return tableau.b @ k


def _midpoint_solve(
    f: VectorField, x: StateVector, h: float, solver: SolverConfig
) -> SolveReport:
    def fixed_point_map(y):
        return x + h * f(0.5 * (x + y))

    def residual(y):
        return y - fixed_point_map(y)

    return solve(solver, x + h * f(x), residual, fixed_point_map)


def rk_increment(
    method: OneStepMethod,
    f: VectorField,
    x: StateVector,
    h: float,
    solver: SolverConfig,
) -> tuple[StateVector, SolveReport | None]:
    """
    Return the increment g̃ with Φ_h(x) = x + h·g̃, and the report of the
    implicit solve (None for explicit methods).
    """
    x = np.asarray(x, dtype=np.float64)
    h = validate_finite(h, "h")
    if method.is_explicit:
        return _explicit_increment(method.tableau, f, x, h), None
    report = _midpoint_solve(f, x, h, solver)
    return np.asarray(f(0.5 * (x + report.solution)), dtype=np.float64), report


def rk_step(
    method: OneStepMethod,
    f: VectorField,
    x: StateVector,
    h: float,
    solver: SolverConfig,
) -> StateVector:
    """
    One step y = Φ_h(x). Explicit kinds evaluate the stages directly; the
    implicit midpoint rule solves y = x + h f((x+y)/2).

    Raises SolverDiverged when the implicit solve fails.
    """
    x = np.asarray(x, dtype=np.float64)
    h = validate_finite(h, "h")
    if method.is_explicit:
        return x + h * _explicit_increment(method.tableau, f, x, h)
    return _midpoint_solve(f, x, h, solver).solution


def two_point_increment(
    method: OneStepMethod,
    f: VectorField,
    x: StateVector,
    y: StateVector,
    h: float,
) -> StateVector:
    """
    g̃(x, y, h) as a function of both endpoints: f((x+y)/2) for the implicit
    midpoint rule, the explicit increment at x otherwise.
    """
    if method.is_explicit:
        return _explicit_increment(method.tableau, f, np.asarray(x), h)
    return np.asarray(f(0.5 * (np.asarray(x) + np.asarray(y))), dtype=np.float64)

