"""Orthogonal projections onto the tangent space of the volume-preserving immersions.

The L^2 projection removes ``A*(p)`` with ``(Laplace - |TrS|^2) p = A(X)``; the G^l
projection removes ``L^-1 A*(p)`` with ``Psi p = A(X)``. In both cases the removed part
is orthogonal to the result in the matching metric.
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from volimm.config import get_projection_tol
from volimm.errors import MinimalImmersion
from volimm.geometry.immersion import DiscreteImmersion, ScalarField, TangentField, check_tangent
from volimm.geometry.kernel import GeometryCache, constraint_adjoint, constraint_operator
from volimm.projection.dense import CurveOperators, dense_sobolev
from volimm.projection.elliptic import (
    SolveMethod,
    resolve_method,
    solve_elliptic_with_stats,
    solve_psi,
)
from volimm.sobolev.krylov import OperatorStats
from volimm.sobolev.operators import apply_L, inner_product_Gl, invert_L

logger = logging.getLogger(__name__)

# rho drift above which decompose warns that it is off the constraint set
_RHO_WARN_TOL = 1e-6


@dataclass(frozen=True)
class ProjectionResult:
    """Projected field, multiplier and diagnostics.

    ``residual`` is the sup of the constraint residual of ``h_mu``; ``orthogonality`` is
    ``|G(h_mu, X - h_mu)| / G(X, X)`` in the metric the projection is orthogonal for.
    """

    h_mu: TangentField
    p: ScalarField
    residual: float
    orthogonality: float
    stats: OperatorStats
    l: int = 0
    reassembly: float | None = None

    def within(self, tol: float) -> bool:
        """True when residual and orthogonality defect are both at most ``tol``."""
        return self.residual <= tol and self.orthogonality <= tol


def _relative_orthogonality(
    cache: GeometryCache, h_mu: TangentField, X: TangentField, l: int
) -> float:
    norm = inner_product_Gl(cache, X, X, l)
    if norm == 0.0:
        return 0.0
    return abs(inner_product_Gl(cache, h_mu, X - h_mu, l)) / norm


def _residual(cache: GeometryCache, h: TangentField, X: TangentField) -> float:
    scale = max(1.0, float(np.max(np.abs(X))))
    return float(np.max(np.abs(constraint_operator(cache, h)))) / scale


def l2_project(
    f: DiscreteImmersion,
    cache: GeometryCache,
    X: TangentField,
    tol: float | None = None,
    method: SolveMethod = SolveMethod.AUTO,
) -> ProjectionResult:
    """L^2(vol g)-orthogonal projection of X onto the volume-preserving directions.

    Both branches are supported: on a minimal immersion the multiplier is gauged to zero
    mean (the Helmholtz-Hodge case).
    """
    check_tangent(f, X)
    tol = tol if tol is not None else get_projection_tol()
    p, stats = solve_elliptic_with_stats(cache, constraint_operator(cache, X), tol * 1e-2, method)
    h_mu = X - constraint_adjoint(cache, p)
    result = ProjectionResult(
        h_mu=h_mu,
        p=p,
        residual=_residual(cache, h_mu, X),
        orthogonality=_relative_orthogonality(cache, h_mu, X, 0),
        stats=stats,
    )
    if not result.within(tol):
        logger.warning(
            "l2 projection defects above %.1e: residual %.3e, orthogonality %.3e",
            tol,
            result.residual,
            result.orthogonality,
        )
    return result


def decompose(
    f: DiscreteImmersion,
    cache: GeometryCache,
    h: TangentField,
    tol: float | None = None,
    method: SolveMethod = SolveMethod.AUTO,
) -> ProjectionResult:
    """Split ``h = h_mu + Tf.grad p + p TrS`` and report the reassembly residual."""
    drift = cache.rho_drift()
    if drift > _RHO_WARN_TOL:
        logger.warning("decompose called off the constraint set (|rho-1| = %.3e)", drift)
    result = l2_project(f, cache, h, tol, method)
    reassembled = result.h_mu + constraint_adjoint(cache, result.p)
    scale = max(1.0, float(np.max(np.abs(h))))
    return ProjectionResult(
        h_mu=result.h_mu,
        p=result.p,
        residual=result.residual,
        orthogonality=result.orthogonality,
        stats=result.stats,
        reassembly=float(np.max(np.abs(reassembled - h))) / scale,
    )


def sobolev_kick(
    cache: GeometryCache,
    p: ScalarField,
    l: int,
    tol: float | None = None,
    method: SolveMethod = SolveMethod.AUTO,
) -> tuple[TangentField, OperatorStats]:
    """The removed component ``L^-1 A*(p)`` of the G^l projection."""
    force = constraint_adjoint(cache, p)
    if l == 0:
        return force, OperatorStats.exact()
    if resolve_method(cache, method) is SolveMethod.DENSE:
        if cache.grid.dim == 1:
            L = CurveOperators.from_cache(cache).sobolev(l)
        else:
            L = dense_sobolev(cache, l)
        return scipy.linalg.solve(L, force.ravel()).reshape(force.shape), OperatorStats.exact()
    return invert_L(cache, force, l, tol)


def hk_project(
    f: DiscreteImmersion,
    cache: GeometryCache,
    X: TangentField,
    l: int,
    tol: float | None = None,
    method: SolveMethod = SolveMethod.AUTO,
) -> ProjectionResult:
    """G^l-orthogonal projection of X onto the volume-preserving directions (l >= 1).

    Raises:
        MinimalImmersion: If TrS vanishes identically.
        ValueError: If l < 1.
    """
    if l < 1:
        raise ValueError("hk_project needs l >= 1; use l2_project for l = 0")
    check_tangent(f, X)
    if cache.is_minimal:
        raise MinimalImmersion("the G^l projection needs a non-minimal immersion")
    tol = tol if tol is not None else get_projection_tol()
    inner_tol = tol * 1e-2
    p, stats = solve_psi(cache, constraint_operator(cache, X), l, inner_tol, method)
    kick, kick_stats = sobolev_kick(cache, p, l, inner_tol, method)
    h_mu = X - kick
    result = ProjectionResult(
        h_mu=h_mu,
        p=p,
        residual=_residual(cache, h_mu, X),
        orthogonality=_relative_orthogonality(cache, h_mu, X, l),
        stats=stats + kick_stats,
        l=l,
    )
    if not result.within(tol):
        logger.warning(
            "G^%d projection defects above %.1e: residual %.3e, orthogonality %.3e",
            l,
            tol,
            result.residual,
            result.orthogonality,
        )
    return result


def project(
    f: DiscreteImmersion,
    cache: GeometryCache,
    X: TangentField,
    l: int = 0,
    tol: float | None = None,
    method: SolveMethod = SolveMethod.AUTO,
) -> ProjectionResult:
    """Dispatch to :func:`l2_project` (l = 0) or :func:`hk_project`."""
    if l == 0:
        return l2_project(f, cache, X, tol, method)
    return hk_project(f, cache, X, l, tol, method)


@dataclass(frozen=True)
class ProjectionDefects:
    """Property defects of one projection, all relative."""

    idempotency: float
    orthogonality: float
    range_defect: float


def projection_defects(
    f: DiscreteImmersion,
    cache: GeometryCache,
    X: TangentField,
    result: ProjectionResult,
    tol: float | None = None,
) -> ProjectionDefects:
    """Idempotency, orthogonality and range defects of a stored projection."""
    again = project(f, cache, result.h_mu, result.l, tol)
    scale = max(float(np.max(np.abs(X))), 1e-300)
    return ProjectionDefects(
        idempotency=float(np.max(np.abs(again.h_mu - result.h_mu))) / scale,
        orthogonality=result.orthogonality,
        range_defect=result.residual,
    )


@dataclass(frozen=True)
class MultiplierRecovery:
    """A multiplier re-derived from ``X - P(X)`` alone."""

    p: ScalarField
    range_defect: float
    p_disagreement: float


def recover_multiplier(
    f: DiscreteImmersion,
    cache: GeometryCache,
    X: TangentField,
    result: ProjectionResult,
    tol: float | None = None,
) -> MultiplierRecovery:
    """Fit ``A*(q) = L(X - P(X))`` in the least-squares sense.

    The normal equations of that fit are the L^2 multiplier equation with right-hand
    side ``A(L(X - P(X)))``. A removed part that really lies in the complement gives a
    zero range defect and ``q = p``.
    """
    check_tangent(f, X)
    complement = apply_L(cache, X - result.h_mu, result.l)
    q, _ = solve_elliptic_with_stats(cache, constraint_operator(cache, complement), tol)
    fitted = constraint_adjoint(cache, q)
    scale = max(float(np.max(np.abs(complement))), 1e-300)
    p_scale = max(float(np.max(np.abs(result.p))), 1.0)
    return MultiplierRecovery(
        p=q,
        range_defect=float(np.max(np.abs(fitted - complement))) / scale,
        p_disagreement=float(np.max(np.abs(q - result.p))) / p_scale,
    )
