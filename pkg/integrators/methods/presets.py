"""
Named integrators for the Kepler experiments and the command line.

    rk4, rk6            the underlying methods, no projection
    a, b, c, d          RK4 projected along i(x′), i(x), i(Φ_h(x)), ½(i(x) + i(x′))
    a6, b6, c6, d6      the same directions over RK6
    b1, b2              method b written as a discrete gradient method with the
                        coordinate increment discrete gradient, plain and
                        symmetrized
    std-v1, std-v2      the standard projection of RK4 along i(x′) or i(Φ_h(x))
    symmetric           the symmetric projection of the implicit midpoint rule
    dahlby1, dahlby2    orthogonal projection along the Gonzalez discrete
                        gradient, of RK4's predictor difference or of the
                        implicit midpoint increment
"""

import typing as t

from integrators.core.config import SolverConfig
from integrators.utils.validations import ValidationError

from .dg import Contraction, DgMethodSpec
from .directions import DirectionRule
from .gradients import DiscreteGradientKind
from .projection import (
    DahlbyVariant,
    MethodSpec,
    StandardVersion,
    make_dahlby,
    make_standard_projection,
    make_symmetric_projection,
)
from .steps import ConserveAgainst
from .underlying import OneStepMethod

AnySpec: t.TypeAlias = MethodSpec | DgMethodSpec

DEFAULT_PRESERVE = (0, 1, 2)
"""Methods a–d preserve the energy, angular momentum and first Runge–Lenz entry."""


class PresetOptions(t.NamedTuple):
    preserve: tuple[int, ...]
    solver: SolverConfig
    conserve_against: ConserveAgainst


PresetBuilder: t.TypeAlias = t.Callable[[PresetOptions], AnySpec]


def _underlying(name: str) -> PresetBuilder:
    method = {"rk4": OneStepMethod.rk4, "rk6": OneStepMethod.rk6}[name]

    def build(options: PresetOptions) -> AnySpec:
        return MethodSpec(underlying=method(), solver=options.solver, name=name)

    return build


def _projected(name: str, underlying: str, rule: DirectionRule) -> PresetBuilder:
    method = {"rk4": OneStepMethod.rk4, "rk6": OneStepMethod.rk6}[underlying]

    def build(options: PresetOptions) -> AnySpec:
        return MethodSpec(
            underlying=method(),
            directions=(rule,) * len(options.preserve),
            conserve_against=options.conserve_against,
            solver=options.solver,
            name=name,
            preserve=options.preserve,
        )

    return build


def _dg_form(name: str, kind: DiscreteGradientKind) -> PresetBuilder:
    def build(options: PresetOptions) -> AnySpec:
        m = len(options.preserve)
        match m:
            case 1:
                contraction = Contraction.SKEW_MATRIX
            case 2:
                contraction = Contraction.TWO_INTEGRAL
            case _:
                contraction = Contraction.CRAMER
        return DgMethodSpec(
            underlying=OneStepMethod.rk4(),
            directions=(DirectionRule.at_old(),) * m,
            discrete_gradients=(kind,) * m,
            solver=options.solver,
            name=name,
            preserve=options.preserve,
            contraction=contraction,
        )

    return build


def _standard(version: StandardVersion) -> PresetBuilder:
    def build(options: PresetOptions) -> AnySpec:
        return make_standard_projection(
            OneStepMethod.rk4(),
            version,
            n_integrals=len(options.preserve),
            preserve=options.preserve,
            solver=options.solver,
            conserve_against=options.conserve_against,
        )

    return build


def _symmetric(options: PresetOptions) -> AnySpec:
    return make_symmetric_projection(
        OneStepMethod.implicit_midpoint(),
        n_integrals=len(options.preserve),
        preserve=options.preserve,
        solver=options.solver,
        conserve_against=options.conserve_against,
    )


def _dahlby(name: str, variant: DahlbyVariant) -> PresetBuilder:
    underlying = (
        OneStepMethod.rk4
        if variant == DahlbyVariant.PREDICTOR_DIFFERENCE
        else OneStepMethod.implicit_midpoint
    )

    def build(options: PresetOptions) -> AnySpec:
        return make_dahlby(
            variant,
            underlying(),
            DiscreteGradientKind.gonzalez(),
            n_integrals=len(options.preserve),
            name=name,
            preserve=options.preserve,
            solver=options.solver,
            conserve_against=options.conserve_against,
        )

    return build


PRESETS: dict[str, PresetBuilder] = {
    "rk4": _underlying("rk4"),
    "rk6": _underlying("rk6"),
    "a": _projected("a", "rk4", DirectionRule.at_new()),
    "b": _projected("b", "rk4", DirectionRule.at_old()),
    "c": _projected("c", "rk4", DirectionRule.at_predictor()),
    "d": _projected("d", "rk4", DirectionRule.midpoint()),
    "a6": _projected("a6", "rk6", DirectionRule.at_new()),
    "b6": _projected("b6", "rk6", DirectionRule.at_old()),
    "c6": _projected("c6", "rk6", DirectionRule.at_predictor()),
    "d6": _projected("d6", "rk6", DirectionRule.midpoint()),
    "b1": _dg_form("b1", DiscreteGradientKind.itoh_abe()),
    "b2": _dg_form("b2", DiscreteGradientKind.itoh_abe_symmetrized()),
    "std-v1": _standard(StandardVersion.V1_AT_NEW),
    "std-v2": _standard(StandardVersion.V2_AT_PREDICTOR),
    "symmetric": _symmetric,
    "dahlby1": _dahlby("dahlby1", DahlbyVariant.PREDICTOR_DIFFERENCE),
    "dahlby2": _dahlby("dahlby2", DahlbyVariant.PROJECTED_RHS),
}

PRESET_NAMES = tuple(PRESETS)

UNPROJECTED = frozenset({"rk4", "rk6"})
DISCRETE_GRADIENT_FORMS = frozenset({"b1", "b2"})


def build_method(
    name: str,
    preserve: t.Sequence[int] = DEFAULT_PRESERVE,
    solver: SolverConfig | None = None,
    conserve_against: ConserveAgainst = ConserveAgainst.INITIAL,
) -> AnySpec:
    """
    Build the preset `name` preserving the integrals at `preserve`.

    The discrete gradient forms b1 and b2 always conserve against the
    previous step; `conserve_against` is ignored for them.
    """
    try:
        builder = PRESETS[name]
    except KeyError:
        known = ", ".join(PRESET_NAMES)
        raise ValidationError(
            f"Unknown method {name!r}; expected one of {known}"
        ) from None
    preserve = tuple(preserve)
    if name not in UNPROJECTED and not preserve:
        raise ValidationError(f"Method {name!r} needs at least one integral")
    if len(set(preserve)) != len(preserve):
        raise ValidationError(f"Repeated integral in {preserve}")
    return builder(PresetOptions(preserve, solver or SolverConfig(), conserve_against))


def describe(spec: AnySpec) -> dict[str, t.Any]:
    """A JSON-ready summary of a built preset, for `projdg presets`."""
    data: dict[str, t.Any] = {
        "name": spec.name,
        "underlying": spec.underlying.name,
        "integrals": spec.n_integrals,
        "directions": [str(rule) for rule in spec.directions],
        "increment": str(spec.increment),
    }
    if isinstance(spec, DgMethodSpec):
        data["form"] = "discrete-gradient"
        data["contraction"] = str(spec.contraction)
        data["discrete_gradients"] = [str(kind) for kind in spec.discrete_gradients]
    else:
        data["form"] = str(spec.formulation)
        data["conserve_against"] = str(spec.conserve_against)
    return data
