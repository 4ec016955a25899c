#!/usr/bin/env python3
import dataclasses
import functools
import json
import logging
import typing as t

import click
import pydantic as p

from integrators.core.config import Settings, SolverConfig, SolverStrategy
from integrators.core.errors import IntegratorError
from integrators.harness.emit import (
    emit_equivalence_csv,
    emit_integral_errors_csv,
    emit_order_csv,
    emit_trajectory_csv,
)
from integrators.harness.studies import (
    equivalence_study,
    integral_error_study,
    order_study,
)
from integrators.harness.trajectory import TrajectoryAborted, run_trajectory
from integrators.methods.dg import DgMethodSpec
from integrators.methods.gradients import DiscreteGradientKind
from integrators.methods.presets import (
    DISCRETE_GRADIENT_FORMS,
    PRESET_NAMES,
    AnySpec,
    build_method,
    describe,
)
from integrators.methods.steps import ConserveAgainst
from integrators.problems.kepler import PERIOD, kepler_initial, kepler_system
from integrators.utils.validations import ValidationError

DEFAULT_ORDER_GRID = (25, 50, 100, 200, 400, 800)


@click.group()
@click.option(
    "-v",
    "--verbose",
    is_flag=True,
    default=False,
    help="Log solver progress and warnings.",
)
@click.pass_context
def projdg(ctx: click.Context, verbose: bool = False):
    """Run projection and discrete gradient integrators on the Kepler problem."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )
    try:
        ctx.obj = Settings()
    except p.ValidationError as exc:
        raise click.UsageError(f"Bad PROJDG_ environment setting: {exc}") from exc


#
# Shared options
#


def _parse_integrals(
    ctx: click.Context, param: click.Parameter, value: str
) -> tuple[int, ...]:
    """Turn a 1-based list like "1,2,3" into 0-based indices."""
    try:
        numbers = [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise click.BadParameter(
            f"expected numbers like 1,2,3, got {value!r}"
        ) from None
    if any(number < 1 for number in numbers):
        raise click.BadParameter("integrals are numbered from 1")
    return tuple(number - 1 for number in numbers)


def _solver_options(fn: t.Callable) -> t.Callable:
    options = [
        click.option(
            "--e",
            "eccentricity",
            type=float,
            required=False,
            default=None,
            help="Orbit eccentricity in [0, 1). Default 0.6.",
        ),
        click.option(
            "--integrals",
            "preserve",
            type=str,
            callback=_parse_integrals,
            required=False,
            default="1,2,3",
            help="Integrals to preserve, numbered from 1 (I1..I4).",
        ),
        click.option(
            "--tol",
            type=float,
            required=False,
            default=None,
            help="Solver tolerance. Default 1e-14.",
        ),
        click.option(
            "--accept-tol",
            type=float,
            required=False,
            default=None,
            help="Largest residual still accepted from an unconverged solve.",
        ),
        click.option(
            "--max-iterations",
            type=int,
            required=False,
            default=None,
            help="Solver iteration limit per step.",
        ),
        click.option(
            "--solver",
            type=click.Choice([strategy.value for strategy in SolverStrategy]),
            required=False,
            default=None,
            help="Nonlinear solver strategy.",
        ),
        click.option(
            "--conserve",
            type=click.Choice([target.value for target in ConserveAgainst]),
            required=False,
            default=None,
            help="Conserve the initial integral values or the previous step's.",
        ),
        click.option(
            "--discrete-gradient",
            type=str,
            required=False,
            default=None,
            help="Replace the preset's discrete gradient: itoh-abe, itoh-abe-sym, "
            "gonzalez or avf[:nodes].",
        ),
        click.option(
            "--progress",
            is_flag=True,
            default=False,
            help="Show a progress bar on stderr.",
        ),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _out_option(fn: t.Callable) -> t.Callable:
    return click.option(
        "--out",
        type=click.File("w"),
        required=False,
        default="-",
        help="CSV output path. Default stdout.",
    )(fn)


class _RunOptions(t.NamedTuple):
    x0: t.Any
    preserve: tuple[int, ...]
    solver: SolverConfig
    conserve: ConserveAgainst | None
    discrete_gradient: DiscreteGradientKind | None
    progress: bool

    def build(self, name: str) -> AnySpec:
        previous_only = name in DISCRETE_GRADIENT_FORMS
        if previous_only and self.conserve == ConserveAgainst.INITIAL:
            raise click.UsageError(
                f"Method {name} conserves against the previous step only"
            )
        spec = build_method(
            name,
            self.preserve,
            self.solver,
            self.conserve or ConserveAgainst.INITIAL,
        )
        if self.discrete_gradient is None:
            return spec
        if isinstance(spec, DgMethodSpec):
            kinds = (self.discrete_gradient,) * spec.n_integrals
            return dataclasses.replace(spec, discrete_gradients=kinds)
        return dataclasses.replace(spec, discrete_gradient=self.discrete_gradient)


def _run_options(settings: Settings, **options) -> _RunOptions:
    eccentricity = options["eccentricity"]
    solver = settings.solver_config(
        tolerance=options["tol"],
        accept_tolerance=options["accept_tol"],
        max_iterations=options["max_iterations"],
        strategy=options["solver"],
    )
    return _RunOptions(
        x0=kepler_initial(
            settings.eccentricity if eccentricity is None else eccentricity
        ),
        preserve=options["preserve"],
        solver=solver,
        conserve=ConserveAgainst(options["conserve"]) if options["conserve"] else None,
        discrete_gradient=(
            DiscreteGradientKind.parse(options["discrete_gradient"])
            if options["discrete_gradient"]
            else None
        ),
        progress=options["progress"],
    )


def _reports_failures(fn: t.Callable) -> t.Callable:
    """
    Turn bad input into usage errors and numerical failures into one JSON
    line on stderr with exit code 2.
    """

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except IntegratorError as exc:
            click.echo(json.dumps(exc.to_data()), err=True)
            click.get_current_context().exit(2)
        except (ValidationError, p.ValidationError) as exc:
            raise click.UsageError(str(exc)) from exc

    return wrapper


def _h(h_num: int) -> float:
    return PERIOD / h_num


#
# Commands
#


@projdg.command()
@click.option(
    "--method",
    type=click.Choice(PRESET_NAMES),
    required=False,
    default="b",
    help="Preset method name.",
)
@click.option(
    "--h-num",
    type=click.IntRange(min=1),
    required=False,
    default=50,
    help="Step size h = 2π/N.",
)
@click.option(
    "--periods",
    type=click.IntRange(min=1),
    required=False,
    default=1,
    help="Number of orbit periods to integrate.",
)
@_solver_options
@_out_option
@click.pass_obj
@_reports_failures
def integrate(
    settings: Settings,
    method: str,
    h_num: int,
    periods: int,
    out: t.TextIO,
    **options,
):
    """Integrate one orbit and emit the trajectory as CSV."""
    run = _run_options(settings, **options)
    spec = run.build(method)
    try:
        record = run_trajectory(
            spec, kepler_system(), run.x0, _h(h_num), h_num * periods, run.progress
        )
    except TrajectoryAborted as exc:
        emit_trajectory_csv(out, exc.record)
        raise
    emit_trajectory_csv(out, record)


@projdg.command()
@click.option(
    "--method",
    type=click.Choice(PRESET_NAMES),
    multiple=True,
    required=False,
    default=("a", "b", "c", "d"),
    help="Preset method name; repeat for several.",
)
@click.option(
    "--h-num",
    type=click.IntRange(min=1),
    multiple=True,
    required=False,
    default=DEFAULT_ORDER_GRID,
    help="Step size h = 2π/N; repeat for the grid.",
)
@click.option(
    "--periods",
    type=click.FloatRange(min=0, min_open=True),
    required=False,
    default=1.0,
    help="Final time in orbit periods.",
)
@click.option(
    "--jobs",
    type=click.IntRange(min=1),
    required=False,
    default=None,
    help="Grid cells run concurrently.",
)
@_solver_options
@_out_option
@click.pass_obj
@_reports_failures
def order(
    settings: Settings,
    method: tuple[str, ...],
    h_num: tuple[int, ...],
    periods: float,
    jobs: int | None,
    out: t.TextIO,
    **options,
):
    """Measure the global error over a grid of step sizes and fit the order."""
    run = _run_options(settings, **options)
    specs = [run.build(name) for name in method]
    rows = order_study(
        specs,
        kepler_system(),
        run.x0,
        list(h_num),
        periods,
        PERIOD,
        jobs or settings.jobs,
    )
    emit_order_csv(out, rows)
    for row in rows:
        if row.failure:
            click.echo(json.dumps(row.to_data()), err=True)


@projdg.command()
@click.option(
    "--method",
    type=click.Choice(PRESET_NAMES),
    required=False,
    default="b",
    help="Reference preset.",
)
@click.option(
    "--variant",
    type=click.Choice(PRESET_NAMES),
    multiple=True,
    required=False,
    default=("b1", "b2"),
    help="Preset compared against the reference; repeat for several.",
)
@click.option(
    "--h-num",
    type=click.IntRange(min=1),
    required=False,
    default=50,
    help="Step size h = 2π/N.",
)
@click.option(
    "--periods",
    type=click.IntRange(min=1),
    required=False,
    default=1,
    help="Number of orbit periods to integrate.",
)
@_solver_options
@_out_option
@click.pass_obj
@_reports_failures
def equivalence(
    settings: Settings,
    method: str,
    variant: tuple[str, ...],
    h_num: int,
    periods: int,
    out: t.TextIO,
    **options,
):
    """
    Emit the per-step distance between a reference method and its variants.
    The one-step agreement from x0 goes to stderr as JSON.
    """
    run = _run_options(settings, **options)
    result = equivalence_study(
        run.build(method),
        [run.build(name) for name in variant],
        kepler_system(),
        run.x0,
        _h(h_num),
        h_num * periods,
        run.progress,
    )
    emit_equivalence_csv(out, result)
    click.echo(
        json.dumps({"reference": method, "single_step": result.single_step}),
        err=True,
    )


@projdg.command()
@click.option(
    "--method",
    type=click.Choice(PRESET_NAMES),
    required=False,
    default="b",
    help="Preset method name.",
)
@click.option(
    "--h-num",
    type=click.IntRange(min=1),
    required=False,
    default=50,
    help="Step size h = 2π/N.",
)
@click.option(
    "--periods",
    type=click.IntRange(min=1),
    required=False,
    default=1,
    help="Number of orbit periods to integrate.",
)
@_solver_options
@_out_option
@click.pass_obj
@_reports_failures
def integrals(
    settings: Settings,
    method: str,
    h_num: int,
    periods: int,
    out: t.TextIO,
    **options,
):
    """Emit |I_m(x_n) − I_m(x0)| for every integral along a run."""
    run = _run_options(settings, **options)
    series = integral_error_study(
        run.build(method),
        kepler_system(),
        run.x0,
        _h(h_num),
        h_num * periods,
        run.progress,
    )
    emit_integral_errors_csv(out, series)


@projdg.command(name="presets")
@click.option(
    "--integrals",
    "preserve",
    type=str,
    callback=_parse_integrals,
    required=False,
    default="1,2,3",
    help="Integrals to preserve, numbered from 1 (I1..I4).",
)
@_reports_failures
def list_presets(preserve: tuple[int, ...]):
    """Describe every preset method as one JSON line."""
    for name in PRESET_NAMES:
        print(json.dumps(describe(build_method(name, preserve))))


if __name__ == "__main__":
    projdg()
