"""The explicit L^2 geodesic equation of closed curves and its closed-form oracle.

For a constant-speed curve the multiplier solves ``p'' - |c''|^2 p = -|c_t'|^2`` (in
arc length) and the acceleration is ``c_tt = (p c')'``. Written on the parameter grid
this is ``(Laplace - |TrS|^2) p = -|d_theta c_t|^2 / g`` and ``c_tt = A*(p)``.
"""

import logging

import numpy as np

from volimm.geodesics.state import GeodesicState
from volimm.geometry.immersion import (
    BackgroundDensity,
    DiscreteImmersion,
    ScalarField,
    TangentField,
)
from volimm.geometry.kernel import GeometryCache, build_geometry, constraint_adjoint
from volimm.geometry.spectral import dealias, partial
from volimm.models.grid import ParamGrid
from volimm.projection.elliptic import solve_constraint_elliptic

logger = logging.getLogger(__name__)

# relative speed variation above which the arc-length reduction is reported as stretched
_SPEED_WARN_TOL = 1e-6


def multiplier_rhs(cache: GeometryCache, f_t: TangentField) -> ScalarField:
    """-|d_theta f_t|^2 / g, the source of the multiplier equation on curves."""
    dv = partial(f_t, cache.grid, 0)
    return -np.sum(dv * dv, axis=-1) * cache.metric.g_inv[..., 0, 0]


def rhs_l2_curve(
    state: GeodesicState,
    mu: BackgroundDensity | None = None,
    tol: float | None = None,
) -> tuple[TangentField, ScalarField]:
    """Acceleration and multiplier of the L^2 geodesic equation on a curve.

    Raises:
        ValueError: If the state is not a curve.
    """
    f = state.f
    if f.grid.dim != 1:
        raise ValueError("rhs_l2_curve is defined for curves")
    cache = build_geometry(f, mu)
    g = cache.metric.g[..., 0, 0]
    spread = float(np.max(g) - np.min(g)) / float(np.mean(g))
    if spread > _SPEED_WARN_TOL:
        logger.debug("curve speed not constant (relative spread %.3e)", spread)
    p = solve_constraint_elliptic(cache, multiplier_rhs(cache, state.f_t), tol)
    return constraint_adjoint(cache, p), p


def truncated(f: DiscreteImmersion) -> DiscreteImmersion:
    """f with the two-thirds rule applied to its periodic part."""
    periodic = f.periodic_part()
    return f.displaced(dealias(periodic, f.grid) - periodic)


def step_rk4_explicit(
    state: GeodesicState,
    dt: float,
    mu: BackgroundDensity | None = None,
    tol: float | None = None,
) -> GeodesicState:
    """One classical RK4 step of (f, f_t); constraints are monitored, not enforced.

    Position and velocity are truncated to the two-thirds band after every step.
    """
    f0, v0 = state.f, state.f_t

    def accel(f: DiscreteImmersion, v: TangentField) -> tuple[TangentField, ScalarField]:
        return rhs_l2_curve(GeodesicState(f=f, f_t=v, t=state.t), mu, tol)

    a1, p1 = accel(f0, v0)
    k1_x, k1_v = v0, a1
    f2 = f0.displaced(k1_x, 0.5 * dt)
    k2_x = v0 + 0.5 * dt * k1_v
    k2_v, _ = accel(f2, k2_x)
    f3 = f0.displaced(k2_x, 0.5 * dt)
    k3_x = v0 + 0.5 * dt * k2_v
    k3_v, _ = accel(f3, k3_x)
    f4 = f0.displaced(k3_x, dt)
    k4_x = v0 + dt * k3_v
    k4_v, _ = accel(f4, k4_x)

    dx = (k1_x + 2.0 * k2_x + 2.0 * k3_x + k4_x) / 6.0
    dv = (k1_v + 2.0 * k2_v + 2.0 * k3_v + k4_v) / 6.0
    return GeodesicState(
        f=truncated(f0.displaced(dx, dt)),
        f_t=dealias(v0 + dt * dv, f0.grid),
        t=state.t + dt,
        p=p1,
    )


def unit_circle(grid: ParamGrid, phase: float = 0.0) -> DiscreteImmersion:
    """c(theta) = (cos(theta + phase), sin(theta + phase)) on a 2 pi periodic grid."""
    (theta,) = grid.coordinates()
    angle = theta * (2.0 * np.pi / grid.periods[0]) + phase
    return DiscreteImmersion(grid=grid, points=np.stack([np.cos(angle), np.sin(angle)], axis=-1))


def rotation_oracle(grid: ParamGrid, omega: float, t: float) -> GeodesicState:
    """Rigid rotation of the unit circle at angular speed omega.

    It is an exact geodesic of every G^l metric; the L^2 multiplier is p = omega^2.
    """
    f = unit_circle(grid, omega * t)
    (theta,) = grid.coordinates()
    angle = theta * (2.0 * np.pi / grid.periods[0]) + omega * t
    f_t = omega * np.stack([-np.sin(angle), np.cos(angle)], axis=-1)
    return GeodesicState(f=f, f_t=f_t, t=t, p=np.full(grid.shape, omega**2))

