"""Constrained Stormer-Verlet (RATTLE) for L^2 geodesics on curves and surfaces.

Half kick with the constraint force ``A*(p)``, drift, solve for p so that the new
position satisfies rho = 1 (SHAKE), then project the velocity back onto the
volume-preserving directions (RATTLE). The velocity projection is exactly
:func:`~volimm.projection.l2_project` of the provisional velocity.

The SHAKE iteration is quasi-Newton with the Jacobian frozen at the start of the step.
It is the exact linearization of the sampled residual ``rho(f) - 1``, taken through the
trace form ``g^ij <d_i h, d_j f>`` and not the divergence form.
"""

import logging
from collections.abc import Callable

import numpy as np
import scipy.linalg

from volimm.config import get_newton_maxiter, get_newton_tol
from volimm.errors import ConstraintSolveFailed
from volimm.geodesics.state import GeodesicState
from volimm.geometry.immersion import (
    BackgroundDensity,
    DiscreteImmersion,
    FloatArray,
    ScalarField,
    TangentField,
)
from volimm.geometry.kernel import (
    GeometryCache,
    build_geometry,
    constraint_adjoint,
    constraint_residual_trace_form,
)
from volimm.geometry.spectral import apply_multiplier
from volimm.geometry.variations import volume_density
from volimm.projection.dense import CurveOperators
from volimm.projection.elliptic import SolveMethod, resolve_method
from volimm.projection.projector import l2_project
from volimm.sobolev.krylov import solve_general
from volimm.sobolev.operators import psi_preconditioner

logger = logging.getLogger(__name__)

Kick = Callable[[ScalarField], TangentField]
JacobianSolve = Callable[[ScalarField], ScalarField]

# inner GMRES tolerance; the outer iteration corrects the remainder
_INNER_RTOL = 1e-8


def position_residual(f: DiscreteImmersion, mu: BackgroundDensity) -> ScalarField:
    """rho(f) - 1 without building the full geometry."""
    return volume_density(f) / mu.weight - 1.0


def initial_multiplier(state: GeodesicState) -> ScalarField:
    """Warm start from the previous step's multiplier when it fits the grid."""
    if state.p is not None and state.p.shape == state.f.grid.shape:
        return np.array(state.p)
    return np.zeros(state.f.grid.shape)


def shake(
    state: GeodesicState,
    dt: float,
    mu: BackgroundDensity,
    kick: Kick,
    jacobian_solve: JacobianSolve,
    *,
    tol: float,
    maxiter: int,
    failure: type[ConstraintSolveFailed] = ConstraintSolveFailed,
) -> tuple[DiscreteImmersion, TangentField, ScalarField]:
    """Quasi-Newton solve for the multiplier of the position constraint.

    Returns the new position, the half-step velocity and the multiplier.

    Raises:
        ConstraintSolveFailed: (or ``failure``) when ``maxiter`` iterations do not reach
            ``max |rho - 1| <= tol``.
    """
    f0, v0 = state.f, state.f_t
    p = initial_multiplier(state)
    iteration = 0
    while True:
        v_half = v0 + 0.5 * dt * kick(p)
        f1 = f0.displaced(v_half, dt)
        residual = position_residual(f1, mu)
        err = float(np.max(np.abs(residual)))
        logger.debug("shake iteration %d: |rho-1| = %.3e", iteration, err)
        if err <= tol:
            return f1, v_half, p
        if iteration >= maxiter:
            raise failure(iteration, err)
        p = p + jacobian_solve(-residual)
        iteration += 1


def linearized_residual(cache: GeometryCache, kick: Kick, scale: float) -> JacobianSolve:
    """q -> d rho along ``scale * kick(q)`` at the cached immersion."""
    f = cache.immersion
    return lambda q: scale * cache.rho * constraint_residual_trace_form(f, cache, kick(q))


def dense_jacobian(
    cache: GeometryCache, ops: CurveOperators, kick_matrix: FloatArray, scale: float
) -> JacobianSolve:
    """LU-factored Jacobian for a curve whose kick is the matrix ``kick_matrix``."""
    matrix = scale * cache.rho.ravel()[:, None] * (ops.trace_form @ kick_matrix)
    lu = scipy.linalg.lu_factor(matrix)
    return lambda r: scipy.linalg.lu_solve(lu, r.ravel()).reshape(r.shape)


def iterative_jacobian(
    cache: GeometryCache, kick: Kick, scale: float, l: int, tol: float
) -> JacobianSolve:
    """Matrix-free Jacobian solve by GMRES, preconditioned with the symbol of -Psi."""
    apply = linearized_residual(cache, kick, scale)
    multiplier = psi_preconditioner(cache, l)

    def precondition(r: ScalarField) -> ScalarField:
        return -apply_multiplier(r, cache.grid, multiplier) / scale

    def solve(r: ScalarField) -> ScalarField:
        q, _ = solve_general(
            apply, r, precondition, rtol=max(tol, _INNER_RTOL), what="shake jacobian"
        )
        return q

    return solve


def _l2_jacobian(cache: GeometryCache, dt: float, tol: float) -> JacobianSolve:
    scale = 0.5 * dt * dt
    if resolve_method(cache, SolveMethod.AUTO) is SolveMethod.DENSE:
        ops = CurveOperators.from_cache(cache)
        return dense_jacobian(cache, ops, ops.adjoint, scale)
    return iterative_jacobian(cache, lambda q: constraint_adjoint(cache, q), scale, 0, tol)


def step_rattle(
    state: GeodesicState,
    dt: float,
    tol: float | None = None,
    *,
    mu: BackgroundDensity | None = None,
    solver_tol: float | None = None,
    maxiter: int | None = None,
) -> GeodesicState:
    """One RATTLE step of the L^2 geodesic equation.

    Raises:
        ConstraintSolveFailed: If the multiplier iteration does not converge.
    """
    tol = tol if tol is not None else get_newton_tol()
    maxiter = maxiter if maxiter is not None else get_newton_maxiter()
    mu = mu if mu is not None else BackgroundDensity.from_immersion(state.f)
    cache0 = build_geometry(state.f, mu)

    f1, v_half, p = shake(
        state,
        dt,
        mu,
        lambda q: constraint_adjoint(cache0, q),
        _l2_jacobian(cache0, dt, solver_tol or tol),
        tol=tol,
        maxiter=maxiter,
    )
    cache1 = build_geometry(f1, mu)
    v1 = l2_project(f1, cache1, v_half, solver_tol).h_mu
    return GeodesicState(f=f1, f_t=v1, t=state.t + dt, p=p)
