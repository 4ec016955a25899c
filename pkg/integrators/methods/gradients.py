"""
Discrete gradients: two-point vector functions ī(x, x′) of a first
integral I with

    ī(x, x′)·(x′ − x) = I(x′) − I(x)   and   ī(x, x) = ∇I(x).
"""

import enum
from dataclasses import dataclass
from functools import cache

import numpy as np
import numpy.typing as npt

from integrators.core.systems import FirstIntegral, StateVector
from integrators.utils.validations import ValidationError, validate_same_shape

COORDINATE_RTOL = 1e-12
"""Coordinate increments below COORDINATE_RTOL·(1+|x_k|) count as zero."""


class GradientVariant(enum.StrEnum):
    ITOH_ABE = "itoh-abe"
    ITOH_ABE_SYMMETRIZED = "itoh-abe-sym"
    MEAN_VALUE = "avf"
    GONZALEZ = "gonzalez"


@dataclass(frozen=True)
class DiscreteGradientKind:
    """Selects a discrete gradient construction."""

    variant: GradientVariant
    quadrature_nodes: int = 4
    """Gauss–Legendre nodes; only used by the mean value (AVF) variant."""

    def __post_init__(self):
        if self.quadrature_nodes < 1:
            raise ValidationError(
                f"Expected at least one quadrature node, got {self.quadrature_nodes}"
            )

    def __str__(self) -> str:
        """The name `parse` accepts."""
        if self.variant == GradientVariant.MEAN_VALUE:
            return f"{self.variant}:{self.quadrature_nodes}"
        return str(self.variant)

    @classmethod
    def itoh_abe(cls) -> "DiscreteGradientKind":
        """Coordinate increment (Itoh–Abe) discrete gradient."""
        return cls(GradientVariant.ITOH_ABE)

    @classmethod
    def itoh_abe_symmetrized(cls) -> "DiscreteGradientKind":
        """Average of the Itoh–Abe gradient over both coordinate orders."""
        return cls(GradientVariant.ITOH_ABE_SYMMETRIZED)

    @classmethod
    def mean_value(cls, quadrature_nodes: int = 4) -> "DiscreteGradientKind":
        """Average vector field gradient with Gauss–Legendre nodes."""
        return cls(GradientVariant.MEAN_VALUE, quadrature_nodes)

    @classmethod
    def gonzalez(cls) -> "DiscreteGradientKind":
        """Midpoint gradient corrected along x′ − x."""
        return cls(GradientVariant.GONZALEZ)

    @classmethod
    def parse(cls, text: str) -> "DiscreteGradientKind":
        """
        Parse "itoh-abe", "itoh-abe-sym", "gonzalez", "avf" or "avf:<nodes>".
        """
        name, _, nodes = text.strip().lower().partition(":")
        try:
            variant = GradientVariant(name)
        except ValueError:
            choices = ", ".join(v.value for v in GradientVariant)
            raise ValidationError(
                f"Unknown discrete gradient {text!r}; expected one of {choices}"
            ) from None
        if nodes and variant != GradientVariant.MEAN_VALUE:
            raise ValidationError(f"Only avf takes a node count, got {text!r}")
        if nodes:
            try:
                return cls(variant, int(nodes))
            except ValueError:
                raise ValidationError(f"Bad node count in {text!r}") from None
        return cls(variant)


#
# Constructions
#


def itoh_abe(integral: FirstIntegral, x: StateVector, xp: StateVector) -> StateVector:
    """
    Coordinate increment discrete gradient: component k is the difference
    quotient of I along coordinate k, with coordinates 1..k−1 already moved
    to x′. Vanishing increments use ∂I/∂x_k at the mixed point instead.
    """
    result = np.empty_like(x)
    current = np.array(x, dtype=np.float64)
    value = integral(current)
    for k in range(x.shape[0]):
        moved = current.copy()
        moved[k] = xp[k]
        moved_value = integral(moved)
        delta = xp[k] - x[k]
        if abs(delta) < COORDINATE_RTOL * (1.0 + abs(x[k])):
            result[k] = integral.gradient(current)[k]
        else:
            result[k] = (moved_value - value) / delta
        current, value = moved, moved_value
    return result


def itoh_abe_symmetrized(
    integral: FirstIntegral, x: StateVector, xp: StateVector
) -> StateVector:
    """½(ī(x, x′) + ī(x′, x)) for the Itoh–Abe ī."""
    return 0.5 * (itoh_abe(integral, x, xp) + itoh_abe(integral, xp, x))


@cache
def _gauss_legendre(nodes: int) -> tuple[npt.NDArray, npt.NDArray]:
    """Nodes and weights on [0, 1]."""
    s, w = np.polynomial.legendre.leggauss(nodes)
    return 0.5 * (s + 1.0), 0.5 * w


def mean_value(
    integral: FirstIntegral, x: StateVector, xp: StateVector, nodes: int = 4
) -> StateVector:
    """∫₀¹ ∇I((1−s)x + s x′) ds by Gauss–Legendre quadrature."""
    s, w = _gauss_legendre(nodes)
    result = np.zeros_like(x)
    for node, weight in zip(s, w):
        result += weight * integral.gradient((1.0 - node) * x + node * xp)
    return result


def gonzalez(integral: FirstIntegral, x: StateVector, xp: StateVector) -> StateVector:
    """
    ∇I(x̄) + ((I(x′) − I(x) − ∇I(x̄)·δ)/|δ|²)·δ with x̄ = (x+x′)/2, δ = x′ − x.
    """
    midpoint = 0.5 * (x + xp)
    gradient = np.asarray(integral.gradient(midpoint), dtype=np.float64)
    delta = xp - x
    scale = 1.0 + float(np.max(np.abs(x)))
    if float(np.max(np.abs(delta))) < COORDINATE_RTOL * scale:
        return gradient
    defect = integral(xp) - integral(x) - float(gradient @ delta)
    return gradient + (defect / float(delta @ delta)) * delta


def discrete_gradient(
    kind: DiscreteGradientKind,
    integral: FirstIntegral,
    x: StateVector,
    xp: StateVector,
) -> StateVector:
    """Return ī(x, x′) for the construction selected by `kind`."""
    x = np.asarray(x, dtype=np.float64)
    xp = np.asarray(xp, dtype=np.float64)
    validate_same_shape(x, xp)
    match kind.variant:
        case GradientVariant.ITOH_ABE:
            return itoh_abe(integral, x, xp)
        case GradientVariant.ITOH_ABE_SYMMETRIZED:
            return itoh_abe_symmetrized(integral, x, xp)
        case GradientVariant.MEAN_VALUE:
            return mean_value(integral, x, xp, kind.quadrature_nodes)
        case GradientVariant.GONZALEZ:
            return gonzalez(integral, x, xp)
    raise ValidationError(f"Unknown discrete gradient {kind}")


def verify_discrete_gradient(
    kind: DiscreteGradientKind,
    integral: FirstIntegral,
    x: StateVector,
    xp: StateVector,
) -> float:
    """Return |ī(x, x′)·(x′ − x) − (I(x′) − I(x))|."""
    x = np.asarray(x, dtype=np.float64)
    xp = np.asarray(xp, dtype=np.float64)
    bar = discrete_gradient(kind, integral, x, xp)
    return abs(float(bar @ (xp - x)) - (integral(xp) - integral(x)))
