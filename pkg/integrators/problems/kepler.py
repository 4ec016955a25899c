"""
Kepler's two-body problem in Cartesian coordinates,

    ẋ = (x₃, x₄, −x₁/r³, −x₂/r³),   r = (x₁² + x₂²)^½,

with its four first integrals: energy, angular momentum and the two
components of the Runge–Lenz vector.
"""

import math

import numpy as np
import pydantic as p

from integrators.core.errors import DomainError, KeplerSingularity
from integrators.core.systems import FirstIntegral, OdeSystem, StateVector, as_state

SINGULAR_RADIUS = 1e-10
PERIOD = 2 * math.pi
"""Period of every bound orbit started from `kepler_initial`."""


class KeplerParams(p.BaseModel):
    model_config = p.ConfigDict(frozen=True)

    eccentricity: float = p.Field(default=0.6, ge=0, lt=1)

    @classmethod
    def from_eccentricity(cls, eccentricity: float) -> "KeplerParams":
        """Build params, reporting an out-of-range eccentricity as DomainError."""
        try:
            return cls(eccentricity=eccentricity)
        except p.ValidationError:
            raise DomainError(
                f"Eccentricity must lie in [0, 1), got {eccentricity}"
            ) from None


def _radius(x: StateVector) -> float:
    r = math.hypot(x[0], x[1])
    if r < SINGULAR_RADIUS:
        raise KeplerSingularity(r)
    return r


def vector_field(x: StateVector) -> StateVector:
    r3 = _radius(x) ** 3
    return np.array([x[2], x[3], -x[0] / r3, -x[1] / r3])


#
# First integrals
#


def energy(x: StateVector) -> float:
    return 0.5 * (x[2] ** 2 + x[3] ** 2) - 1.0 / _radius(x)


def energy_gradient(x: StateVector) -> StateVector:
    r3 = _radius(x) ** 3
    return np.array([x[0] / r3, x[1] / r3, x[2], x[3]])


def angular_momentum(x: StateVector) -> float:
    return x[0] * x[3] - x[1] * x[2]


def angular_momentum_gradient(x: StateVector) -> StateVector:
    return np.array([x[3], -x[2], -x[1], x[0]])


def runge_lenz_first(x: StateVector) -> float:
    return x[1] * x[2] ** 2 - x[0] * x[2] * x[3] - x[1] / _radius(x)


def runge_lenz_first_gradient(x: StateVector) -> StateVector:
    r = _radius(x)
    r3 = r**3
    return np.array(
        [
            -x[2] * x[3] + x[0] * x[1] / r3,
            x[2] ** 2 - 1.0 / r + x[1] ** 2 / r3,
            2.0 * x[1] * x[2] - x[0] * x[3],
            -x[0] * x[2],
        ]
    )


def runge_lenz_second(x: StateVector) -> float:
    return x[0] * x[3] ** 2 - x[1] * x[2] * x[3] - x[0] / _radius(x)


def runge_lenz_second_gradient(x: StateVector) -> StateVector:
    r = _radius(x)
    r3 = r**3
    return np.array(
        [
            x[3] ** 2 - 1.0 / r + x[0] ** 2 / r3,
            -x[2] * x[3] + x[0] * x[1] / r3,
            -x[1] * x[3],
            2.0 * x[0] * x[3] - x[1] * x[2],
        ]
    )


INTEGRALS = (
    FirstIntegral("I1", energy, energy_gradient),
    FirstIntegral("I2", angular_momentum, angular_momentum_gradient),
    FirstIntegral("I3", runge_lenz_first, runge_lenz_first_gradient),
    FirstIntegral("I4", runge_lenz_second, runge_lenz_second_gradient),
)


def kepler_system() -> OdeSystem:
    """The planar Kepler problem with integrals [I1, I2, I3, I4]."""
    return OdeSystem("kepler", 4, vector_field, INTEGRALS)


def kepler_initial(params: KeplerParams | float = 0.6) -> StateVector:
    """
    Return (1−e, 0, 0, √((1+e)/(1−e))), the pericentre of an orbit with
    eccentricity e and period 2π.

    Raises DomainError unless 0 <= e < 1.
    """
    if not isinstance(params, KeplerParams):
        params = KeplerParams.from_eccentricity(params)
    e = params.eccentricity
    return as_state([1.0 - e, 0.0, 0.0, math.sqrt((1.0 + e) / (1.0 - e))], 4)
