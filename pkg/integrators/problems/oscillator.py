"""Small fixtures: the harmonic oscillator and a rigid rotation of ℝ^d."""

import numpy as np

from integrators.core.systems import FirstIntegral, OdeSystem, StateVector
from integrators.utils.validations import ValidationError


def _half_norm_squared(x: StateVector) -> float:
    return 0.5 * float(np.dot(x, x))


def _identity_gradient(x: StateVector) -> StateVector:
    return np.array(x, dtype=np.float64)


def harmonic_oscillator() -> OdeSystem:
    """q̇ = p, ṗ = −q with the single integral I = ½(q² + p²)."""
    return OdeSystem(
        "oscillator",
        2,
        lambda x: np.array([x[1], -x[0]]),
        (FirstIntegral("I", _half_norm_squared, _identity_gradient),),
    )


def rotation(dimension: int = 2) -> OdeSystem:
    """
    ẋ = Jx for a block-diagonal rotation generator J (dimension must be
    even), conserving I = ½|x|².
    """
    if dimension < 2 or dimension % 2:
        raise ValidationError(f"Rotation needs an even dimension, got {dimension}")
    generator = np.zeros((dimension, dimension))
    for k in range(0, dimension - 1, 2):
        generator[k, k + 1] = 1.0
        generator[k + 1, k] = -1.0
    return OdeSystem(
        f"rotation{dimension}",
        dimension,
        lambda x: generator @ x,
        (FirstIntegral("I", _half_norm_squared, _identity_gradient),),
    )
