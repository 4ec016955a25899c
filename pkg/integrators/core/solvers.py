"""
Per-step nonlinear solvers.

Every implicit equation in the integrators is handed to `solve` as a
residual r(z) (zero at the solution) and, where the step has one, a map G
with the same fixed points. Newton works on the residual, fixed-point
iteration on the map.
"""

import logging
import typing as t
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .config import SolverConfig, SolverStrategy
from .errors import SolverDiverged
from .smalldense import solve_square

logger = logging.getLogger(__name__)

Array: t.TypeAlias = npt.NDArray[np.float64]
ArrayMap: t.TypeAlias = t.Callable[[Array], Array]

ROUNDOFF_UPDATE = 8 * float(np.finfo(np.float64).eps)
"""A Newton update below ROUNDOFF_UPDATE · (1 + |z|∞) cannot improve z."""


@dataclass(frozen=True)
class SolveReport:
    """The outcome of one nonlinear solve."""

    solution: Array
    iterations: int
    final_residual: float
    converged: bool

    def to_data(self) -> dict:
        """Return a JSON-ready summary (without the solution)."""
        return {
            "iterations": self.iterations,
            "final_residual": self.final_residual,
            "converged": self.converged,
        }


def _norm(v: Array) -> float:
    return float(np.max(np.abs(v))) if v.size else 0.0


def _as_array(x0: t.Any) -> Array:
    return np.array(x0, dtype=np.float64, ndmin=1)


def fixed_point_solve(map_: ArrayMap, x0: t.Any, config: SolverConfig) -> SolveReport:
    """
    Iterate z ← map_(z) from x0 until the update ∞-norm is at most
    `config.tolerance` or `config.max_iterations` is reached.

    Raises SolverDiverged as soon as an iterate is not finite.
    """
    z = _as_array(x0)
    update = np.inf
    for iteration in range(1, config.max_iterations + 1):
        z_next = np.asarray(map_(z), dtype=np.float64)
        if not np.all(np.isfinite(z_next)):
            raise SolverDiverged(iteration, float("inf"))
        update = _norm(z_next - z)
        z = z_next
        if update <= config.tolerance:
            logger.debug("fixed point converged in %d iterations", iteration)
            return SolveReport(z, iteration, update, True)
    return SolveReport(z, config.max_iterations, update, False)


def fd_jacobian(
    residual: ArrayMap, z: Array, r: Array, fd_epsilon: float
) -> npt.NDArray[np.float64]:
    """Forward-difference Jacobian with column step fd_epsilon · (1 + |z_k|)."""
    jacobian = np.empty((r.shape[0], z.shape[0]))
    for k in range(z.shape[0]):
        shifted = z.copy()
        shifted[k] += fd_epsilon * (1.0 + abs(z[k]))
        # The representable step, not the requested one.
        step = shifted[k] - z[k]
        jacobian[:, k] = (np.asarray(residual(shifted)) - r) / step
    return jacobian


def newton_solve(residual: ArrayMap, x0: t.Any, config: SolverConfig) -> SolveReport:
    """
    Undamped Newton iteration on `residual` with a forward-difference
    Jacobian, one LU solve per iteration.

    Stops when |r|∞ <= tolerance, when the update reaches roundoff level or
    after max_iterations corrections. A singular Jacobian raises
    SingularMatrix; a non-finite residual raises SolverDiverged.
    """
    z = _as_array(x0)
    r = np.asarray(residual(z), dtype=np.float64)
    iterations = 0
    while True:
        norm = _norm(r)
        if not np.isfinite(norm):
            raise SolverDiverged(iterations, norm)
        if norm <= config.tolerance:
            logger.debug("newton converged in %d iterations", iterations)
            return SolveReport(z, iterations, norm, True)
        if iterations >= config.max_iterations:
            return SolveReport(z, iterations, norm, False)
        jacobian = fd_jacobian(residual, z, r, config.fd_epsilon)
        delta = solve_square(jacobian, -r)
        z = z + delta
        r = np.asarray(residual(z), dtype=np.float64)
        iterations += 1
        if _norm(delta) <= ROUNDOFF_UPDATE * (1.0 + _norm(z)):
            norm = _norm(r)
            logger.debug("newton stalled at residual %.3e", norm)
            return SolveReport(z, iterations, norm, norm <= config.tolerance)


def solve(
    config: SolverConfig,
    x0: t.Any,
    residual: ArrayMap,
    fixed_point_map: ArrayMap | None = None,
) -> SolveReport:
    """
    Solve residual(z) = 0 with the strategy named by `config`, then apply
    the acceptance rule: an unconverged solve whose final residual is within
    `config.accept_tolerance` is returned (with a warning), anything worse
    raises SolverDiverged.
    """
    if config.strategy == SolverStrategy.FIXED_POINT and fixed_point_map is not None:
        report = fixed_point_solve(fixed_point_map, x0, config)
        if not report.converged:
            # The update norm only bounds the error; judge by the residual.
            report = SolveReport(
                report.solution,
                report.iterations,
                _norm(np.asarray(residual(report.solution))),
                False,
            )
    else:
        report = newton_solve(residual, x0, config)
    return accept(report, config)


def accept(report: SolveReport, config: SolverConfig) -> SolveReport:
    """Apply the acceptance rule of `solve` to an existing report."""
    if report.converged:
        return report
    if report.final_residual <= config.accept_tolerance:
        logger.warning(
            "accepting unconverged solve: residual %.3e after %d iterations",
            report.final_residual,
            report.iterations,
        )
        return report
    raise SolverDiverged(report.iterations, report.final_residual)
