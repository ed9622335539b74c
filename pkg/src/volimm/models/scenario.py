"""Scenario and integrator configuration models."""

import math
from enum import StrEnum
from typing import Self

from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator, model_validator
from pydantic_core import PydanticCustomError


class Scheme(StrEnum):
    """Time integration scheme for geodesics."""

    RK4_EXPLICIT = "rk4_explicit"
    RATTLE = "rattle"
    DISCRETE_LAGRANGIAN = "discrete_lagrangian"


class IntegratorConfig(BaseModel):
    """Time stepping parameters shared by all geodesic schemes."""

    model_config = ConfigDict(extra="forbid")

    scheme: Scheme = Scheme.RK4_EXPLICIT
    dt: float = Field(default=1e-3, gt=0.0, le=1.0)
    t_end: float = Field(default=1.0, gt=0.0, le=1e3)
    stride: int = Field(default=10, ge=1)
    newton_tol: float = Field(default=1e-10, gt=0.0, lt=1.0)
    solver_tol: float = Field(default=1e-10, gt=0.0, lt=1.0)
    drift_tol: float = Field(default=1e-8, gt=0.0, lt=1.0)
    renormalize: bool = False

    @property
    def n_steps(self) -> int:
        """Number of steps needed to reach t_end."""
        return max(1, round(self.t_end / self.dt))


class ScenarioCase(StrEnum):
    """What a scenario runs."""

    WHIP_CURVE = "whip_curve"
    SURFACE_L2 = "surface_l2"
    EULER_TORUS = "euler_torus"
    PROJECTION_STUDY = "projection_study"


class InitialFamily(StrEnum):
    """Named initial-condition families."""

    CIRCLE_BUMP = "circle_bump"
    ROTATION = "rotation"
    TORUS_NORMAL_BUMP = "torus_normal_bump"
    SHEAR_FLOW = "shear_flow"
    RANDOM_FIELD = "random_field"


class InitialCondition(BaseModel):
    """Initial-condition family with its parameters."""

    model_config = ConfigDict(extra="forbid")

    family: InitialFamily
    amplitude: float = Field(default=0.1, ge=0.0, le=10.0)
    center: float = Field(default=math.pi, ge=0.0, le=2.0 * math.pi)
    width: float = Field(default=0.5, gt=0.0, le=math.pi)
    omega: float = Field(default=1.0, ge=-100.0, le=100.0)
    major_radius: float = Field(default=2.0, gt=0.0, le=100.0)
    minor_radius: float = Field(default=1.0, gt=0.0, le=100.0)
    modes: int = Field(default=4, ge=1, le=16)

    @model_validator(mode="after")
    def _check_torus(self) -> Self:
        if self.minor_radius >= self.major_radius:
            raise ValueError("minor_radius must be below major_radius for an immersed torus")
        return self


class SweepSpec(BaseModel):
    """Parameter grid for the sweep subcommand."""

    model_config = ConfigDict(extra="forbid")

    param: str = Field(pattern=r"^(integrator\.dt|metric_order|grid)$")
    values: list[float] = Field(min_length=1)


_DEFAULT_GRIDS: dict[ScenarioCase, list[int]] = {
    ScenarioCase.WHIP_CURVE: [128],
    ScenarioCase.SURFACE_L2: [32, 32],
    ScenarioCase.EULER_TORUS: [64, 64],
    ScenarioCase.PROJECTION_STUDY: [64],
}

_DEFAULT_FAMILIES: dict[ScenarioCase, InitialFamily] = {
    ScenarioCase.WHIP_CURVE: InitialFamily.CIRCLE_BUMP,
    ScenarioCase.SURFACE_L2: InitialFamily.TORUS_NORMAL_BUMP,
    ScenarioCase.EULER_TORUS: InitialFamily.SHEAR_FLOW,
    ScenarioCase.PROJECTION_STUDY: InitialFamily.RANDOM_FIELD,
}

_ALLOWED_FAMILIES: dict[ScenarioCase, set[InitialFamily]] = {
    ScenarioCase.WHIP_CURVE: {InitialFamily.CIRCLE_BUMP, InitialFamily.ROTATION},
    ScenarioCase.SURFACE_L2: {InitialFamily.TORUS_NORMAL_BUMP},
    ScenarioCase.EULER_TORUS: {InitialFamily.SHEAR_FLOW, InitialFamily.RANDOM_FIELD},
    ScenarioCase.PROJECTION_STUDY: {InitialFamily.CIRCLE_BUMP, InitialFamily.RANDOM_FIELD},
}


class Scenario(BaseModel):
    """A complete, reproducible run description.

    Case-dependent defaults (grid, initial family, scheme) are filled in during
    validation, so a printed scenario always carries every value explicitly.
    """

    model_config = ConfigDict(extra="forbid")

    name: str = Field(min_length=1, max_length=64, pattern=r"^[A-Za-z0-9_.-]+$")
    case: ScenarioCase
    grid: list[int] | None = None
    study_sizes: list[int] = Field(default_factory=lambda: [32, 64, 128])
    metric_order: int = Field(default=0, ge=0, le=8)
    integrator: IntegratorConfig | None = None
    initial: InitialCondition | None = None
    output_dir: str | None = None
    seed: int = Field(default=0, ge=0)
    sweep: SweepSpec | None = None

    @field_validator("grid")
    @classmethod
    def _check_grid_length(cls, grid: list[int] | None, info: ValidationInfo) -> list[int] | None:
        case = info.data.get("case")
        if grid is None or case is None:
            return grid
        expected = 1 if case in (ScenarioCase.WHIP_CURVE, ScenarioCase.PROJECTION_STUDY) else 2
        if len(grid) != expected:
            # a wrong-length grid is a shape error, not an out-of-range value
            raise PydanticCustomError(
                "grid_length",
                "{case} needs a {expected}-entry grid",
                {"case": str(case), "expected": expected},
            )
        return grid

    @model_validator(mode="after")
    def _fill_defaults(self) -> Self:
        if self.grid is None:
            self.grid = list(_DEFAULT_GRIDS[self.case])
        if self.initial is None:
            self.initial = InitialCondition(family=_DEFAULT_FAMILIES[self.case])
        if self.integrator is None:
            scheme = Scheme.RATTLE if self.case is ScenarioCase.SURFACE_L2 else Scheme.RK4_EXPLICIT
            self.integrator = IntegratorConfig(scheme=scheme)
        for size in [*self.grid, *self.study_sizes]:
            if size < 8 or size % 2 or size > 4096:
                raise ValueError(f"grid sizes must be even and within [8, 4096], got {size}")
        if self.initial.family not in _ALLOWED_FAMILIES[self.case]:
            raise ValueError(f"initial family {self.initial.family} not available for {self.case}")
        if self.case is ScenarioCase.SURFACE_L2 and self.integrator.scheme is not Scheme.RATTLE:
            raise ValueError("surface_l2 runs only with the rattle scheme")
        if self.integrator.scheme is Scheme.DISCRETE_LAGRANGIAN and self.metric_order < 1:
            raise ValueError("discrete_lagrangian needs metric_order >= 1")
        return self

    @property
    def grid_sizes(self) -> list[int]:
        """Grid sizes after default filling."""
        if self.grid is None:
            raise RuntimeError("Scenario defaults not filled")
        return self.grid

    @property
    def initial_condition(self) -> InitialCondition:
        """Initial condition after default filling."""
        if self.initial is None:
            raise RuntimeError("Scenario defaults not filled")
        return self.initial

    @property
    def integrator_config(self) -> IntegratorConfig:
        """Integrator configuration after default filling."""
        if self.integrator is None:
            raise RuntimeError("Scenario defaults not filled")
        return self.integrator
