"""CSV writers for the experiment results. Floats keep 17 significant digits."""

import csv
import typing as t

from integrators.utils.format import fmt_float

from .studies import EquivalenceResult, IntegralErrorSeries, OrderStudyRow
from .trajectory import TrajectoryRecord


def _error_columns(names: t.Iterable[str]) -> list[str]:
    return [f"{name}err" for name in names]


def emit_trajectory_csv(out: t.TextIO, record: TrajectoryRecord):
    """
    One row per state: t, x1..xd, the error of every integral, and the λ
    norm and solver iterations of the step that produced the state (blank
    on the initial row).
    """
    dimension = record.states.shape[1]
    state_columns = [f"x{i + 1}" for i in range(dimension)]
    error_columns = _error_columns(record.integral_names)
    fieldnames = ["t", *state_columns, *error_columns, "lambda_norm", "iters"]
    writer = csv.DictWriter(out, fieldnames=fieldnames)
    writer.writeheader()
    errors = record.integral_errors()
    for n, time in enumerate(record.times):
        row = {"t": fmt_float(time)}
        row.update(zip(state_columns, map(fmt_float, record.states[n]), strict=True))
        row.update(zip(error_columns, map(fmt_float, errors[n]), strict=True))
        if n:
            row["lambda_norm"] = fmt_float(record.lambda_norms[n - 1])
            row["iters"] = str(record.solver_iterations[n - 1])
        else:
            row["lambda_norm"] = row["iters"] = ""
        writer.writerow(row)


def emit_order_csv(out: t.TextIO, rows: t.Iterable[OrderStudyRow]):
    """One row per (method, h) cell; the method's slope repeats on each row."""
    writer = csv.DictWriter(out, fieldnames=["method", "h", "error", "slope"])
    writer.writeheader()
    for row in rows:
        writer.writerow(
            {
                "method": row.method_name,
                "h": fmt_float(row.h),
                "error": fmt_float(row.final_error),
                "slope": fmt_float(row.fitted_slope),
            }
        )


def emit_equivalence_csv(out: t.TextIO, result: EquivalenceResult):
    """t and one `diff_<variant>` column per variant."""
    columns = {name: f"diff_{name}" for name in result.differences}
    writer = csv.DictWriter(out, fieldnames=["t", *columns.values()])
    writer.writeheader()
    for n, time in enumerate(result.times):
        row = {"t": fmt_float(time)}
        for name, series in result.differences.items():
            row[columns[name]] = fmt_float(series[n])
        writer.writerow(row)


def emit_integral_errors_csv(out: t.TextIO, series: IntegralErrorSeries):
    error_columns = _error_columns(series.integral_names)
    writer = csv.DictWriter(out, fieldnames=["t", *error_columns])
    writer.writeheader()
    for time, errors in zip(series.times, series.errors, strict=True):
        row = {"t": fmt_float(time)}
        row.update(zip(error_columns, map(fmt_float, errors), strict=True))
        writer.writerow(row)
