"""Pydantic models for grids, scenarios, and run records."""

from volimm.models.grid import ParamGrid
from volimm.models.record import CheckResult, RunRecord
from volimm.models.scenario import (
    InitialCondition,
    InitialFamily,
    IntegratorConfig,
    Scenario,
    ScenarioCase,
    Scheme,
    SweepSpec,
)

__all__ = [
    "CheckResult",
    "InitialCondition",
    "InitialFamily",
    "IntegratorConfig",
    "ParamGrid",
    "RunRecord",
    "Scenario",
    "ScenarioCase",
    "Scheme",
    "SweepSpec",
]
