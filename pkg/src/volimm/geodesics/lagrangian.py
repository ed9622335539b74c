"""Constrained variational integrator for G^l geodesics of curves (l >= 1).

The discrete Lagrangian ``dt/2 G^l(dq/dt, dq/dt)`` with the midpoint-free
Stormer-Verlet quadrature, constrained by rho = 1 through a multiplier field, gives
the same kick/drift/project structure as RATTLE with the constraint force replaced by
its G^l Riesz representative ``L^-1 A*(p)``. The Newton Jacobian of the position
constraint is the exact linearization of the sampled residual along that kick, a
discrete ``dt^2/2 Psi``, frozen at the start of the step.
"""

import logging

import scipy.linalg

from volimm.config import get_newton_maxiter, get_newton_tol
from volimm.errors import MinimalImmersion, NewtonFailed
from volimm.geodesics.rattle import (
    JacobianSolve,
    Kick,
    dense_jacobian,
    iterative_jacobian,
    shake,
)
from volimm.geodesics.state import GeodesicState
from volimm.geometry.immersion import BackgroundDensity, ScalarField, TangentField
from volimm.geometry.kernel import GeometryCache, build_geometry
from volimm.projection.dense import CurveOperators
from volimm.projection.elliptic import SolveMethod, resolve_method
from volimm.projection.projector import hk_project, sobolev_kick

logger = logging.getLogger(__name__)


def _operators(cache: GeometryCache, dt: float, l: int, tol: float) -> tuple[Kick, JacobianSolve]:
    scale = 0.5 * dt * dt
    if resolve_method(cache, SolveMethod.AUTO) is SolveMethod.DENSE:
        ops = CurveOperators.from_cache(cache)
        kick_matrix = scipy.linalg.lu_solve(scipy.linalg.lu_factor(ops.sobolev(l)), ops.adjoint)
        shape = cache.immersion.points.shape

        def dense_kick(p: ScalarField) -> TangentField:
            return (kick_matrix @ p.ravel()).reshape(shape)

        return dense_kick, dense_jacobian(cache, ops, kick_matrix, scale)

    def kick(p: ScalarField) -> TangentField:
        return sobolev_kick(cache, p, l, tol)[0]

    return kick, iterative_jacobian(cache, kick, scale, l, tol)


def step_discrete_lagrangian(
    state: GeodesicState,
    dt: float,
    l: int,
    tol: float | None = None,
    *,
    mu: BackgroundDensity | None = None,
    solver_tol: float | None = None,
    maxiter: int | None = None,
) -> GeodesicState:
    """One step of the constrained variational scheme for the G^l metric on curves.

    Raises:
        ValueError: If the state is not a curve or l < 1.
        MinimalImmersion: If the curve has vanishing curvature.
        NewtonFailed: If the multiplier iteration does not converge.
    """
    if state.f.grid.dim != 1:
        raise ValueError("the discrete Lagrangian scheme is implemented for curves")
    if l < 1:
        raise ValueError("the discrete Lagrangian scheme needs l >= 1; use rattle for l = 0")
    tol = tol if tol is not None else get_newton_tol()
    maxiter = maxiter if maxiter is not None else get_newton_maxiter()
    mu = mu if mu is not None else BackgroundDensity.from_immersion(state.f)
    cache0 = build_geometry(state.f, mu)
    if cache0.is_minimal:
        raise MinimalImmersion("G^l geodesics need a curve with nonvanishing curvature")

    kick, jacobian_solve = _operators(cache0, dt, l, solver_tol or tol)
    f1, v_half, p = shake(
        state,
        dt,
        mu,
        kick,
        jacobian_solve,
        tol=tol,
        maxiter=maxiter,
        failure=NewtonFailed,
    )
    cache1 = build_geometry(f1, mu)
    v1 = hk_project(f1, cache1, v_half, l, solver_tol).h_mu
    return GeodesicState(f=f1, f_t=v1, t=state.t + dt, p=p)
