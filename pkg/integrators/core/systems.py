"""Autonomous ODE systems ẋ = f(x) together with their first integrals."""

import typing as t
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from integrators.utils.validations import (
    ValidationError,
    validate_dimension,
    validate_finite_vector,
    validate_positive,
)

StateVector: t.TypeAlias = npt.NDArray[np.float64]
"""A dense real state vector; immutable once produced by `as_state`."""

VectorField: t.TypeAlias = t.Callable[[StateVector], StateVector]


def as_state(values: t.Any, dimension: int | None = None) -> StateVector:
    """Return a read-only float64 copy of `values`, checking entries and size."""
    array = np.array(validate_finite_vector(values, dimension), dtype=np.float64)
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class FirstIntegral:
    """A scalar invariant I of the flow together with its analytic gradient."""

    name: str
    value: t.Callable[[StateVector], float]
    gradient: t.Callable[[StateVector], StateVector]

    def __call__(self, x: StateVector) -> float:
        """Evaluate the integral."""
        return self.value(x)


@dataclass(frozen=True)
class OdeSystem:
    """An autonomous ODE of fixed dimension with an ordered list of integrals."""

    name: str
    dimension: int
    vector_field: VectorField
    integrals: tuple[FirstIntegral, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not isinstance(self.dimension, int) or self.dimension < 1:
            raise ValidationError(
                f"Expected a positive dimension, got {self.dimension}"
            )
        object.__setattr__(self, "integrals", tuple(self.integrals))

    @property
    def n_integrals(self) -> int:
        """The number M of first integrals."""
        return len(self.integrals)

    def f(self, x: StateVector) -> StateVector:
        """Evaluate the vector field, checking the output dimension."""
        return validate_dimension(
            np.asarray(self.vector_field(x), dtype=np.float64), self.dimension
        )

    def select(self, indices: t.Iterable[int]) -> "OdeSystem":
        """Return the same system restricted to the integrals at `indices`."""
        picked = []
        for index in indices:
            if not 0 <= index < self.n_integrals:
                raise ValidationError(
                    f"{self.name} has {self.n_integrals} integrals, no index {index}"
                )
            picked.append(self.integrals[index])
        return OdeSystem(self.name, self.dimension, self.vector_field, tuple(picked))


def evaluate_integrals(system: OdeSystem, x: StateVector) -> npt.NDArray[np.float64]:
    """Return [I_1(x), …, I_M(x)] in integral order."""
    validate_dimension(np.asarray(x), system.dimension)
    return np.array([integral(x) for integral in system.integrals], dtype=np.float64)


def central_difference_gradient(
    value: t.Callable[[StateVector], float], x: StateVector, eps: float
) -> StateVector:
    """Approximate ∇value(x) with central differences of step `eps`."""
    x = np.asarray(x, dtype=np.float64)
    gradient = np.empty_like(x)
    for k in range(x.shape[0]):
        step = np.zeros_like(x)
        step[k] = eps
        gradient[k] = (value(x + step) - value(x - step)) / (2.0 * eps)
    return gradient


def check_gradient(integral: FirstIntegral, x: StateVector, eps: float) -> float:
    """
    Return the max-norm deviation between the analytic gradient of `integral`
    and its central finite-difference approximation at `x`.
    """
    eps = validate_positive(eps, "eps")
    x = np.asarray(x, dtype=np.float64)
    analytic = np.asarray(integral.gradient(x), dtype=np.float64)
    validate_dimension(analytic, x.shape[0])
    return float(
        np.max(np.abs(analytic - central_difference_gradient(integral.value, x, eps)))
    )
