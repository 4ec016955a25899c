"""Repeated application of a step map, with per-step diagnostics."""

import logging
import math
import typing as t
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from tqdm import tqdm

from integrators.core.errors import IntegratorError, SolverDiverged
from integrators.core.systems import (
    OdeSystem,
    StateVector,
    as_state,
    evaluate_integrals,
)
from integrators.methods.dg import DgMethodSpec, dg_step
from integrators.methods.projection import (
    MethodSpec,
    conservation_targets,
    projection_step,
)
from integrators.methods.steps import StepResult, check_step_size
from integrators.utils.validations import ValidationError

logger = logging.getLogger(__name__)

AnySpec: t.TypeAlias = MethodSpec | DgMethodSpec

Array: t.TypeAlias = npt.NDArray[np.float64]


@dataclass(frozen=True)
class TrajectoryRecord:
    """
    States x₀ … x_N of a run together with what each step reported.

    `integral_values` holds every integral of the system (not only the
    preserved ones) at each of the N+1 states. `lambda_norms`,
    `solver_iterations` and `converged` describe the N steps.
    """

    method_name: str
    integral_names: tuple[str, ...]
    times: Array
    states: Array
    integral_values: Array
    lambda_norms: Array
    solver_iterations: npt.NDArray[np.int64]
    converged: npt.NDArray[np.bool_]

    @property
    def n_steps(self) -> int:
        """The number of accepted steps."""
        return len(self.lambda_norms)

    @property
    def final_state(self) -> StateVector:
        """x_N."""
        return self.states[-1]

    def integral_errors(self) -> Array:
        """|I_m(x_n) − I_m(x₀)| for every state n and integral m."""
        return np.abs(self.integral_values - self.integral_values[0])


class TrajectoryAborted(SolverDiverged):
    """
    A step failed; `record` holds the states accepted before it and `cause`
    the step's own error.

    A failure other than SolverDiverged (a singular Newton Jacobian, a
    degenerate denominator) reports no iteration count and no residual.
    """

    def __init__(
        self, cause: IntegratorError, step_index: int, record: TrajectoryRecord
    ):
        if isinstance(cause, SolverDiverged):
            super().__init__(cause.iterations, cause.residual, step_index)
        else:
            super().__init__(
                0,
                math.nan,
                step_index,
                f"{type(cause).__name__} at step {step_index}: {cause}",
            )
        self.cause = cause
        self.record = record

    def to_data(self) -> dict:
        """Return a machine-readable description of the failure."""
        data = {**super().to_data(), "cause": type(self.cause).__name__}
        if not isinstance(self.cause, SolverDiverged):
            data.update(iterations=None, residual=None)
        return data


class _Recorder:
    def __init__(self, spec: AnySpec, system: OdeSystem, x0: StateVector, h: float):
        self.spec = spec
        self.system = system
        self.h = h
        self.states = [x0]
        self.values = [evaluate_integrals(system, x0)]
        self.lambda_norms: list[float] = []
        self.iterations: list[int] = []
        self.converged: list[bool] = []

    def append(self, result: StepResult) -> None:
        self.states.append(result.x_new)
        self.values.append(evaluate_integrals(self.system, result.x_new))
        self.lambda_norms.append(result.lambda_norm)
        self.iterations.append(result.solver_report.iterations)
        self.converged.append(result.solver_report.converged)

    def build(self) -> TrajectoryRecord:
        n_states = len(self.states)
        return TrajectoryRecord(
            method_name=self.spec.name,
            integral_names=tuple(integral.name for integral in self.system.integrals),
            times=self.h * np.arange(n_states, dtype=np.float64),
            states=np.array(self.states, dtype=np.float64),
            integral_values=np.array(self.values, dtype=np.float64).reshape(
                n_states, self.system.n_integrals
            ),
            lambda_norms=np.array(self.lambda_norms, dtype=np.float64),
            solver_iterations=np.array(self.iterations, dtype=np.int64),
            converged=np.array(self.converged, dtype=np.bool_),
        )


def advance(
    spec: AnySpec, system: OdeSystem, x: StateVector, h: float, x0: StateVector
) -> StepResult:
    """Take one step of `spec` from x, conserving against x₀ where it applies."""
    if isinstance(spec, DgMethodSpec):
        return dg_step(spec, system, x, h)
    if not spec.n_integrals:
        return projection_step(spec, system, x, h)
    return projection_step(
        spec, system, x, h, conservation_targets(spec, system, x, x0)
    )


def run_trajectory(
    spec: AnySpec,
    system: OdeSystem,
    x0: t.Any,
    h: float,
    n_steps: int,
    progress: bool = False,
) -> TrajectoryRecord:
    """
    Apply the step map of `spec` n_steps times starting from x0.

    Raises TrajectoryAborted, carrying the partial record and the failing
    step index, when any step raises an IntegratorError.
    """
    if isinstance(n_steps, bool) or not isinstance(n_steps, int) or n_steps < 1:
        raise ValidationError(f"Expected at least one step, got {n_steps!r}")
    h = check_step_size(h)
    x0 = as_state(x0, system.dimension)
    recorder = _Recorder(spec, system, x0, h)
    x = x0
    for step_index in tqdm(
        range(n_steps), desc=spec.name, unit="step", disable=not progress
    ):
        try:
            result = advance(spec, system, x, h, x0)
        except IntegratorError as exc:
            logger.warning("%s aborted at step %d: %s", spec.name, step_index, exc)
            raise TrajectoryAborted(exc, step_index, recorder.build()) from exc
        recorder.append(result)
        x = result.x_new
    logger.debug("%s: %d steps of h = %g", spec.name, n_steps, h)
    return recorder.build()
