"""Pseudo-spectral RK4 for the two-dimensional Euler equations in vorticity form.

``omega_t + u . grad omega = 0`` with ``u`` recovered from the streamfunction. The
advection term is formed in physical space and truncated with the 2/3 rule.
"""

import logging

import numpy as np

from volimm.errors import CFLViolation
from volimm.euler.fields import VelocityField2D, VorticityField, velocity_from_vorticity
from volimm.geometry.immersion import ScalarField
from volimm.geometry.spectral import dealias, partial

logger = logging.getLogger(__name__)

MIN_EULER_SIZE = 32
CFL_NUMBER = 0.5


def cfl_bound(velocity: VelocityField2D) -> float:
    """Largest admissible dt, ``0.5 min(dx) / max |u|`` (inf for a fluid at rest)."""
    speed = velocity.max_speed()
    if speed == 0.0:
        return float("inf")
    return CFL_NUMBER * min(velocity.grid.spacing) / speed


def advection(field: VorticityField) -> ScalarField:
    """Dealiased ``-(u . grad omega)``."""
    grid = field.grid
    velocity = velocity_from_vorticity(field)
    flux = velocity.u * partial(field.omega, grid, 0) + velocity.v * partial(field.omega, grid, 1)
    return -dealias(flux, grid)


def step_euler_vorticity(field: VorticityField, dt: float) -> VorticityField:
    """One classical RK4 step; the spatial mean of omega is reset to ``field.mean``.

    Raises:
        ValueError: If the grid is coarser than 32 x 32.
        CFLViolation: If dt exceeds the CFL bound of the current velocity.
    """
    if min(field.grid.sizes) < MIN_EULER_SIZE:
        raise ValueError(f"the Euler solver needs at least {MIN_EULER_SIZE}^2 nodes")
    bound = cfl_bound(velocity_from_vorticity(field))
    if dt > bound:
        raise CFLViolation(dt, bound)

    w0 = field.omega
    k1 = advection(field)
    k2 = advection(field.with_omega(w0 + 0.5 * dt * k1))
    k3 = advection(field.with_omega(w0 + 0.5 * dt * k2))
    k4 = advection(field.with_omega(w0 + dt * k3))
    w1 = w0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    w1 = w1 + (field.mean - float(np.mean(w1)))
    return field.with_omega(w1)
