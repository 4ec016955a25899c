"""Exceptions raised by the integrators."""

from integrators.utils.validations import (
    DimensionMismatch,
    DomainError,
    ValidationError,
)

__all__ = [
    "ComplementarityFailure",
    "DegenerateDenominator",
    "DimensionMismatch",
    "DomainError",
    "IntegratorError",
    "KeplerSingularity",
    "SingularMatrix",
    "SolverDiverged",
    "ValidationError",
]


class IntegratorError(Exception):
    """Base class for numerical failures inside a step or a solve."""

    def to_data(self) -> dict:
        """Return a machine-readable description of the failure."""
        return {"error": type(self).__name__, "message": str(self)}


class SingularMatrix(IntegratorError):
    """Raised when an LU factorization meets a pivot that is zero to precision."""

    def __init__(self, pivot: float, message: str | None = None):
        super().__init__(message or f"Matrix is singular (pivot {pivot:.3e})")
        self.pivot = pivot

    def to_data(self) -> dict:
        """Return a machine-readable description of the failure."""
        return {**super().to_data(), "pivot": self.pivot}


class ComplementarityFailure(SingularMatrix):
    """
    Raised when BᵀA is not invertible, so span(A) and span(B)⊥ are not
    complementary subspaces and no oblique projector exists.
    """

    def __init__(self, pivot: float):
        super().__init__(
            pivot, f"BᵀA is singular (pivot {pivot:.3e}); no oblique projector"
        )


class SolverDiverged(IntegratorError):
    """Raised when a per-step nonlinear solve fails."""

    def __init__(
        self,
        iterations: int,
        residual: float,
        step_index: int | None = None,
        message: str | None = None,
    ):
        where = f" at step {step_index}" if step_index is not None else ""
        super().__init__(
            message
            or f"Solver failed{where} after {iterations} iterations "
            f"(residual {residual:.3e})"
        )
        self.iterations = iterations
        self.residual = residual
        self.step_index = step_index

    def at_step(self, step_index: int) -> "SolverDiverged":
        """Return a copy of this failure tagged with a trajectory step index."""
        return SolverDiverged(self.iterations, self.residual, step_index)

    def to_data(self) -> dict:
        """Return a machine-readable description of the failure."""
        return {
            **super().to_data(),
            "iterations": self.iterations,
            "residual": self.residual,
            "step": self.step_index,
        }


class DegenerateDenominator(IntegratorError):
    """Raised when the normalizing denominator of a skew form vanishes."""

    def __init__(self, value: float, scale: float):
        super().__init__(
            f"Denominator {value:.3e} is negligible against scale {scale:.3e}"
        )
        self.value = value
        self.scale = scale


class KeplerSingularity(IntegratorError):
    """Raised when the Kepler field or integrals are evaluated at r ≈ 0."""

    def __init__(self, radius: float):
        super().__init__(f"Kepler system evaluated at r = {radius:.3e}")
        self.radius = radius
