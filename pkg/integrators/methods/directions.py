"""Rules for the direction vectors ĩ_m(x, x′, h) along which a step is corrected."""

import enum
import typing as t
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from integrators.core.systems import FirstIntegral, StateVector
from integrators.utils.validations import ValidationError

from .gradients import DiscreteGradientKind, discrete_gradient


class DirectionVariant(enum.StrEnum):
    AT_NEW = "at-new"
    AT_OLD = "at-old"
    AT_PREDICTOR = "at-predictor"
    MIDPOINT = "midpoint"
    FROM_DISCRETE_GRADIENT = "discrete-gradient"


@dataclass(frozen=True)
class DirectionRule:
    """
    How ĩ_m is built from the gradient i_m of an integral:

    - AT_NEW: i_m(x′)
    - AT_OLD: i_m(x)
    - AT_PREDICTOR: i_m(y), y = Φ_h(x) frozen for the whole step
    - MIDPOINT: ½(i_m(x) + i_m(x′))
    - FROM_DISCRETE_GRADIENT: ī_m(x, x′) for the given kind

    Every rule reduces to i_m(x) at x′ = x, h = 0.
    """

    variant: DirectionVariant
    gradient: DiscreteGradientKind | None = None

    def __post_init__(self):
        has_gradient = self.gradient is not None
        wants_gradient = self.variant == DirectionVariant.FROM_DISCRETE_GRADIENT
        if has_gradient != wants_gradient:
            need = "need a" if wants_gradient else "take no"
            raise ValidationError(f"{self.variant} directions {need} gradient kind")

    def __str__(self) -> str:
        """The name used in `describe` output."""
        if self.gradient is not None:
            return f"{self.variant}({self.gradient})"
        return str(self.variant)

    @classmethod
    def at_new(cls) -> "DirectionRule":
        """∇I at x′."""
        return cls(DirectionVariant.AT_NEW)

    @classmethod
    def at_old(cls) -> "DirectionRule":
        """∇I at x."""
        return cls(DirectionVariant.AT_OLD)

    @classmethod
    def at_predictor(cls) -> "DirectionRule":
        """∇I at Φ_h(x)."""
        return cls(DirectionVariant.AT_PREDICTOR)

    @classmethod
    def midpoint(cls) -> "DirectionRule":
        """∇I at (x + x′)/2."""
        return cls(DirectionVariant.MIDPOINT)

    @classmethod
    def from_discrete_gradient(cls, kind: DiscreteGradientKind) -> "DirectionRule":
        """A discrete gradient ī(x, x′)."""
        return cls(DirectionVariant.FROM_DISCRETE_GRADIENT, kind)

    @property
    def depends_on_new(self) -> bool:
        """True when the direction changes with x′ during a solve."""
        frozen = (DirectionVariant.AT_OLD, DirectionVariant.AT_PREDICTOR)
        return self.variant not in frozen

    def evaluate(
        self,
        integral: FirstIntegral,
        x: StateVector,
        xp: StateVector,
        predictor: StateVector,
    ) -> StateVector:
        """ĩ at the given states; `predictor` is Φ_h(x)."""
        match self.variant:
            case DirectionVariant.AT_NEW:
                return integral.gradient(xp)
            case DirectionVariant.AT_OLD:
                return integral.gradient(x)
            case DirectionVariant.AT_PREDICTOR:
                return integral.gradient(predictor)
            case DirectionVariant.MIDPOINT:
                return 0.5 * (integral.gradient(x) + integral.gradient(xp))
            case DirectionVariant.FROM_DISCRETE_GRADIENT:
                return discrete_gradient(self.gradient, integral, x, xp)
        raise ValidationError(f"Unknown direction rule {self}")


TwoPointVector: t.TypeAlias = DirectionRule | DiscreteGradientKind
"""Either kind of two-point vector field built from an integral."""


def evaluate_two_point(
    rule: TwoPointVector,
    integral: FirstIntegral,
    x: StateVector,
    xp: StateVector,
    predictor: StateVector,
) -> StateVector:
    """Evaluate a direction rule or a discrete gradient at (x, x′)."""
    if isinstance(rule, DiscreteGradientKind):
        return discrete_gradient(rule, integral, x, xp)
    return rule.evaluate(integral, x, xp, predictor)


def direction_matrix(
    rules: t.Sequence[TwoPointVector],
    integrals: t.Sequence[FirstIntegral],
    x: StateVector,
    xp: StateVector,
    predictor: StateVector,
) -> npt.NDArray[np.float64]:
    """Stack the vectors of `rules` for `integrals` as columns of a d × M matrix."""
    columns = [
        np.asarray(evaluate_two_point(rule, integral, x, xp, predictor), np.float64)
        for rule, integral in zip(rules, integrals, strict=True)
    ]
    if not columns:
        return np.zeros((np.asarray(x).shape[0], 0))
    return np.column_stack(columns)
