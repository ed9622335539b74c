"""Geodesic integrators on the volume-preserving immersions."""

from volimm.geodesics.convergence import ConvergenceStudy, convergence_study, fit_slope
from volimm.geodesics.curve import (
    multiplier_rhs,
    rhs_l2_curve,
    rotation_oracle,
    step_rk4_explicit,
    unit_circle,
)
from volimm.geodesics.integrate import STEPPERS, Stepper, integrate
from volimm.geodesics.lagrangian import step_discrete_lagrangian
from volimm.geodesics.rattle import position_residual, shake, step_rattle
from volimm.geodesics.state import (
    INVARIANT_COLUMNS,
    GeodesicState,
    InvariantRecord,
    Trajectory,
    energy,
    reverse,
)

__all__ = [
    "INVARIANT_COLUMNS",
    "STEPPERS",
    "ConvergenceStudy",
    "GeodesicState",
    "InvariantRecord",
    "Stepper",
    "Trajectory",
    "convergence_study",
    "energy",
    "fit_slope",
    "integrate",
    "multiplier_rhs",
    "position_residual",
    "reverse",
    "rhs_l2_curve",
    "rotation_oracle",
    "shake",
    "step_discrete_lagrangian",
    "step_rattle",
    "step_rk4_explicit",
    "unit_circle",
]
