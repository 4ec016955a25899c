"""
Experiments built on `run_trajectory`.

- `order_study`: global error at t = 2π·periods over a grid h = 2π/n, with a
  least-squares slope per method.
- `equivalence_study`: how far variants of one method drift from a reference.
- `integral_error_study`: |I_m(x_n) − I_m(x₀)| along a run.
"""

import logging
import math
import typing as t
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from integrators.core.config import SolverConfig
from integrators.core.errors import IntegratorError
from integrators.core.systems import OdeSystem, StateVector, as_state
from integrators.methods.underlying import OneStepMethod, rk_step
from integrators.utils.validations import ValidationError, validate_positive

from .trajectory import AnySpec, advance, run_trajectory

logger = logging.getLogger(__name__)

Array: t.TypeAlias = npt.NDArray[np.float64]

SLOPE_WINDOW = (1e-12, 1e-1)
"""Errors outside this range are left out of the slope fit."""

REFERENCE_STEPS_PER_PERIOD = 4000


#
# Order study
#


@dataclass(frozen=True)
class OrderStudyRow:
    method_name: str
    h: float
    n_steps: int
    final_error: float
    fitted_slope: float
    failure: str | None = None
    """Why the run for this cell did not finish; final_error is NaN then."""

    def to_data(self) -> dict:
        """Return a JSON-ready dict of the row."""
        return {
            "method": self.method_name,
            "h": self.h,
            "n_steps": self.n_steps,
            "error": self.final_error,
            "slope": self.fitted_slope,
            "failure": self.failure,
        }


def fit_slope(
    hs: t.Sequence[float],
    errors: t.Sequence[float],
    window: tuple[float, float] = SLOPE_WINDOW,
) -> float:
    """
    Least-squares slope of ln(error) against ln(h), using only the points
    whose error lies inside `window`. NaN when fewer than two remain.
    """
    low, high = window
    points = [
        (math.log(h), math.log(error))
        for h, error in zip(hs, errors, strict=True)
        if math.isfinite(error) and low <= error <= high
    ]
    if len(points) < 2 or len({x for x, _ in points}) < 2:
        return math.nan
    log_h, log_error = np.array(points).T
    return float(np.polyfit(log_h, log_error, 1)[0])


def reference_state(
    system: OdeSystem,
    x0: StateVector,
    period: float,
    periods: float,
    steps_per_period: int = REFERENCE_STEPS_PER_PERIOD,
) -> StateVector:
    """
    The exact state at t = period·periods: x₀ itself for whole periods,
    otherwise a fine-step RK6 solution.
    """
    if float(periods).is_integer():
        return x0
    n_steps = max(1, math.ceil(steps_per_period * periods))
    h = period * periods / n_steps
    method = OneStepMethod.rk6()
    config = SolverConfig()
    x = x0
    for _ in range(n_steps):
        x = rk_step(method, system.f, x, h, config)
    return x


def _order_cell(
    spec: AnySpec,
    system: OdeSystem,
    x0: StateVector,
    reference: StateVector,
    h: float,
    n_steps: int,
) -> tuple[float, str | None]:
    try:
        record = run_trajectory(spec, system, x0, h, n_steps)
    except IntegratorError as exc:
        logger.warning("%s failed at h = %g: %s", spec.name, h, exc)
        return math.nan, str(exc)
    return float(np.max(np.abs(record.final_state - reference))), None


def order_study(
    specs: t.Sequence[AnySpec],
    system: OdeSystem,
    x0: t.Any,
    step_counts: t.Sequence[int],
    periods: float = 1,
    period: float = 2 * math.pi,
    jobs: int = 1,
) -> list[OrderStudyRow]:
    """
    Run every spec with h = period/n for each n in `step_counts` up to
    t = period·periods and measure |x_N − x(t)|∞.

    Cells run on `jobs` threads; the rows come back grouped by spec in the
    order given, and within a spec in the order of `step_counts`.
    """
    if not step_counts:
        raise ValidationError("Expected at least one step count")
    if any(isinstance(n, bool) or not isinstance(n, int) or n < 1 for n in step_counts):
        raise ValidationError(f"Step counts must be positive integers: {step_counts}")
    validate_positive(periods, "periods")
    if isinstance(jobs, bool) or not isinstance(jobs, int) or jobs < 1:
        raise ValidationError(f"Expected at least one job, got {jobs!r}")
    x0 = as_state(x0, system.dimension)
    reference = reference_state(system, x0, period, periods)
    counts = [math.ceil(n * periods - 1e-9) for n in step_counts]
    cells = [
        (spec, period * periods / n_steps, n_steps)
        for spec in specs
        for n_steps in counts
    ]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [
            pool.submit(_order_cell, spec, system, x0, reference, h, n_steps)
            for spec, h, n_steps in cells
        ]
        outcomes = [future.result() for future in futures]

    rows = []
    for index, spec in enumerate(specs):
        block = slice(index * len(step_counts), (index + 1) * len(step_counts))
        block_cells, block_outcomes = cells[block], outcomes[block]
        slope = fit_slope(
            [h for _, h, _ in block_cells], [error for error, _ in block_outcomes]
        )
        rows.extend(
            OrderStudyRow(spec.name, h, n_steps, error, slope, failure)
            for (_, h, n_steps), (error, failure) in zip(
                block_cells, block_outcomes, strict=True
            )
        )
    return rows


#
# Equivalence and integral errors
#


def variant_labels(variants: t.Sequence[AnySpec]) -> list[str]:
    """Spec names, with a repeated name numbered `name#2`, `name#3`, ..."""
    labels: list[str] = []
    for variant in variants:
        label, copy = variant.name, 1
        while label in labels:
            copy += 1
            label = f"{variant.name}#{copy}"
        labels.append(label)
    return labels


@dataclass(frozen=True)
class EquivalenceResult:
    """|x_ref(t_n) − x_variant(t_n)|∞ per variant label, and one-step agreement."""

    reference_name: str
    times: Array
    differences: dict[str, Array]
    single_step: dict[str, float]


def equivalence_study(
    reference: AnySpec,
    variants: t.Sequence[AnySpec],
    system: OdeSystem,
    x0: t.Any,
    h: float,
    n_steps: int,
    progress: bool = False,
) -> EquivalenceResult:
    """
    Run the reference and each variant from x0 and compare them state by
    state. `single_step` holds the difference after one step from x0, where
    no accumulated roundoff separates the runs.
    """
    x0 = as_state(x0, system.dimension)
    base = run_trajectory(reference, system, x0, h, n_steps, progress)
    first = advance(reference, system, x0, h, x0).x_new
    differences, single_step = {}, {}
    for label, variant in zip(variant_labels(variants), variants, strict=True):
        record = run_trajectory(variant, system, x0, h, n_steps, progress)
        differences[label] = np.max(np.abs(record.states - base.states), axis=1)
        single_step[label] = float(
            np.max(np.abs(advance(variant, system, x0, h, x0).x_new - first))
        )
    return EquivalenceResult(reference.name, base.times, differences, single_step)


@dataclass(frozen=True)
class IntegralErrorSeries:
    method_name: str
    integral_names: tuple[str, ...]
    times: Array
    errors: Array
    """Shape (N+1, M): |I_m(x_n) − I_m(x₀)|."""


def integral_error_study(
    spec: AnySpec,
    system: OdeSystem,
    x0: t.Any,
    h: float,
    n_steps: int,
    progress: bool = False,
) -> IntegralErrorSeries:
    record = run_trajectory(spec, system, x0, h, n_steps, progress)
    return IntegralErrorSeries(
        record.method_name,
        record.integral_names,
        record.times,
        record.integral_errors(),
    )
