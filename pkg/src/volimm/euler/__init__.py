"""Incompressible Euler flow on the flat torus, the M = N case of the immersion space."""

from volimm.euler.crosscheck import CrosscheckReport, crosscheck_general_projection
from volimm.euler.evolve import EULER_COLUMNS, EulerSnapshot, EulerTrajectory, integrate_euler
from volimm.euler.fields import (
    VelocityField2D,
    VorticityField,
    divergence,
    enstrophy,
    gradient_potential,
    kinetic_energy,
    leray_project,
    velocity_from_vorticity,
    vorticity_from_velocity,
)
from volimm.euler.flowmap import (
    FourierInterpolant,
    advect_flowmap,
    flow_map_density,
    identity_flow_map,
)
from volimm.euler.vorticity import cfl_bound, step_euler_vorticity

__all__ = [
    "EULER_COLUMNS",
    "CrosscheckReport",
    "EulerSnapshot",
    "EulerTrajectory",
    "FourierInterpolant",
    "VelocityField2D",
    "VorticityField",
    "advect_flowmap",
    "cfl_bound",
    "crosscheck_general_projection",
    "divergence",
    "enstrophy",
    "flow_map_density",
    "gradient_potential",
    "identity_flow_map",
    "integrate_euler",
    "kinetic_energy",
    "leray_project",
    "step_euler_vorticity",
    "velocity_from_vorticity",
    "vorticity_from_velocity",
]
