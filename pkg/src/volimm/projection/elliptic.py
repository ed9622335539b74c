"""Scalar elliptic solves for the projection multiplier."""

import logging
from enum import StrEnum

import numpy as np
import scipy.linalg

from volimm.config import get_cg_rtol, get_dense_max_nodes, get_projection_tol
from volimm.errors import MinimalImmersion, MinimalIncompatibleRHS
from volimm.geometry.immersion import FloatArray, ScalarField
from volimm.geometry.kernel import GeometryCache, laplace_beltrami
from volimm.geometry.spectral import apply_multiplier, symbol_multiplier
from volimm.projection.dense import CurveOperators, dense_elliptic, dense_psi
from volimm.sobolev.krylov import OperatorStats, solve_spd
from volimm.sobolev.operators import apply_Psi, psi_preconditioner

logger = logging.getLogger(__name__)


class SolveMethod(StrEnum):
    """How an elliptic system is solved."""

    AUTO = "auto"
    CG = "cg"
    DENSE = "dense"


def resolve_method(cache: GeometryCache, method: SolveMethod) -> SolveMethod:
    """Pick dense LU for small curve grids when asked to choose."""
    if method is not SolveMethod.AUTO:
        return method
    if cache.grid.dim == 1 and cache.grid.node_count <= get_dense_max_nodes():
        return SolveMethod.DENSE
    return SolveMethod.CG


def _zero_mean(cache: GeometryCache, p: ScalarField) -> ScalarField:
    return p - cache.integrate(p) / cache.total_volume()


def elliptic_operator(cache: GeometryCache, p: ScalarField) -> ScalarField:
    """Laplace p - |TrS|^2 p."""
    return laplace_beltrami(cache, p) - cache.tr_s_norm_sq * p


def solve_elliptic_with_stats(
    cache: GeometryCache,
    rhs: ScalarField,
    tol: float | None = None,
    method: SolveMethod = SolveMethod.AUTO,
) -> tuple[ScalarField, OperatorStats]:
    """Solve ``(Laplace - |TrS|^2) p = rhs`` and report solver statistics.

    On a minimal immersion the operator is the Laplacian alone, the right-hand side must
    integrate to zero, and the zero-mean solution is returned.

    Raises:
        MinimalIncompatibleRHS: Minimal immersion with a right-hand side of nonzero mean.
        NoConvergence: CG hit its iteration cap.
    """
    tol = tol if tol is not None else get_cg_rtol()
    minimal = cache.is_minimal
    if minimal:
        mean = cache.integrate(rhs) / cache.total_volume()
        scale = max(float(np.max(np.abs(rhs))), 1e-300)
        if abs(mean) > get_projection_tol() * scale:
            raise MinimalIncompatibleRHS(mean, get_projection_tol() * scale)
        rhs = rhs - mean

    if resolve_method(cache, method) is SolveMethod.DENSE:
        if cache.grid.dim == 1:
            matrix = CurveOperators.from_cache(cache).elliptic(cache.tr_s_norm_sq)
        else:
            matrix = dense_elliptic(cache)
        flat = rhs.ravel()
        if minimal:
            p = np.linalg.lstsq(matrix, flat, rcond=None)[0]
        else:
            p = scipy.linalg.solve(matrix, flat)
        p = p.reshape(rhs.shape)
        stats = OperatorStats.exact()
    else:
        shift = 0.0 if minimal else float(np.mean(cache.tr_s_norm_sq))

        def symbol(k_sq: FloatArray) -> FloatArray:
            denom = k_sq + shift
            out = np.ones_like(k_sq)
            nonzero = denom > 0
            out[nonzero] = 1.0 / denom[nonzero]
            return out

        multiplier = symbol_multiplier(cache.grid, cache.metric.mean_inverse(), symbol)
        neg_p, stats = solve_spd(
            lambda q: -elliptic_operator(cache, q),
            rhs,
            cache.metric.sqrt_det,
            lambda r: apply_multiplier(r, cache.grid, multiplier),
            rtol=tol,
            what="elliptic",
        )
        p = -neg_p

    if minimal:
        p = _zero_mean(cache, p)
    return p, stats


def solve_constraint_elliptic(
    cache: GeometryCache,
    rhs: ScalarField,
    tol: float | None = None,
    method: SolveMethod = SolveMethod.AUTO,
) -> ScalarField:
    """Solve ``(Laplace - |TrS|^2) p = rhs`` for the L^2 projection multiplier."""
    p, _ = solve_elliptic_with_stats(cache, rhs, tol, method)
    return p


def solve_psi(
    cache: GeometryCache,
    rhs: ScalarField,
    l: int,
    tol: float | None = None,
    method: SolveMethod = SolveMethod.AUTO,
) -> tuple[ScalarField, OperatorStats]:
    """Solve ``Psi p = rhs`` for the G^l projection multiplier.

    Raises:
        MinimalImmersion: If TrS vanishes identically (Psi has constants in its kernel).
        NoConvergence: Outer or inner CG hit its iteration cap.
    """
    if cache.is_minimal:
        raise MinimalImmersion("the G^l projection needs a non-minimal immersion")
    tol = tol if tol is not None else get_cg_rtol()

    if resolve_method(cache, method) is SolveMethod.DENSE:
        p = scipy.linalg.solve(dense_psi(cache, l), rhs.ravel()).reshape(rhs.shape)
        return p, OperatorStats.exact()

    multiplier = psi_preconditioner(cache, l)
    neg_p, stats = solve_spd(
        lambda q: -apply_Psi(cache, q, l, tol * 1e-2),
        rhs,
        cache.metric.sqrt_det,
        lambda r: apply_multiplier(r, cache.grid, multiplier),
        rtol=tol,
        what=f"psi(l={l})",
    )
    return -neg_p, stats
