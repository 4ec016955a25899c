"""Solver configuration and CLI-wide settings."""

import enum

import pydantic as p
from pydantic_settings import BaseSettings, SettingsConfigDict


class SolverStrategy(enum.StrEnum):
    """How the implicit equations of a step are solved."""

    NEWTON = "newton"
    FIXED_POINT = "fixed-point"


class SolverConfig(p.BaseModel):
    """Parameters shared by every per-step nonlinear solve."""

    model_config = p.ConfigDict(frozen=True)

    tolerance: float = p.Field(default=1e-14, gt=0)
    """Residual (Newton) or update (fixed point) ∞-norm threshold."""

    max_iterations: int = p.Field(default=50, ge=1)

    strategy: SolverStrategy = SolverStrategy.NEWTON

    fd_epsilon: float = p.Field(default=1e-7, gt=0)
    """Relative step of the forward-difference Jacobian."""

    accept_tolerance: float = p.Field(default=1e-10, gt=0)
    """
    A solve that stops short of `tolerance` is still accepted (flagged as
    unconverged) when its final residual is below this.
    """

    @p.model_validator(mode="after")
    def _accept_not_tighter(self) -> "SolverConfig":
        if self.accept_tolerance < self.tolerance:
            raise ValueError("accept_tolerance must be >= tolerance")
        return self


class Settings(BaseSettings):
    """
    Defaults for the `projdg` command line. Every field can be set through a
    `PROJDG_`-prefixed environment variable; CLI flags take precedence.
    """

    model_config = SettingsConfigDict(env_prefix="PROJDG_")

    tolerance: float = p.Field(default=1e-14, gt=0)
    max_iterations: int = p.Field(default=50, ge=1)
    strategy: SolverStrategy = SolverStrategy.NEWTON
    fd_epsilon: float = p.Field(default=1e-7, gt=0)
    accept_tolerance: float = p.Field(default=1e-10, gt=0)
    eccentricity: float = p.Field(default=0.6, ge=0, lt=1)
    jobs: int = p.Field(default=1, ge=1)

    def solver_config(self, **overrides) -> SolverConfig:
        """Build a SolverConfig from these settings and any non-None overrides."""
        values = {
            "tolerance": self.tolerance,
            "max_iterations": self.max_iterations,
            "strategy": self.strategy,
            "fd_epsilon": self.fd_epsilon,
            "accept_tolerance": self.accept_tolerance,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        values["accept_tolerance"] = max(
            values["accept_tolerance"], values["tolerance"]
        )
        return SolverConfig.model_validate(values)
