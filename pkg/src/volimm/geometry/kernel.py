"""Discrete differential geometry of immersions into flat targets.

Everything here is a pure function of immutable inputs. Index conventions, with
``...`` standing for the grid axes:

    jacobian      [..., a, i]     d_i f^a
    metric        [..., i, j]     g_ij = <d_i f, d_j f>
    christoffel   [..., k, i, j]  Gamma^k_ij
    second_fund   [..., a, i, j]  S(e_i, e_j)^a
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from volimm.config import get_orth_tol, get_rank_eps
from volimm.errors import RankDeficient
from volimm.geometry.immersion import (
    BackgroundDensity,
    DiscreteImmersion,
    FloatArray,
    ParamVectorField,
    ScalarField,
    TangentField,
    check_tangent,
)
from volimm.geometry.spectral import partial, partials
from volimm.models.grid import ParamGrid

logger = logging.getLogger(__name__)

# rho may deviate this much before constraint residuals are flagged as unreliable
_RHO_WARN_TOL = 1e-6


@dataclass(frozen=True)
class MetricField:
    """Pullback metric with cached inverse and volume factor."""

    g: FloatArray
    g_inv: FloatArray
    sqrt_det: ScalarField

    @classmethod
    def from_jacobian(cls, jacobian: FloatArray, rank_eps: float | None = None) -> MetricField:
        """Build g = Tf^T Tf and check the immersion condition at every node."""
        g = np.einsum("...ai,...aj->...ij", jacobian, jacobian)
        g = 0.5 * (g + np.swapaxes(g, -1, -2))
        det = np.linalg.det(g)
        d = g.shape[-1]
        scale = float(np.mean(np.trace(g, axis1=-2, axis2=-1)) / d) ** d
        threshold = (rank_eps if rank_eps is not None else get_rank_eps()) * scale
        worst = int(np.argmin(det))
        if not det.flat[worst] > threshold:
            node = tuple(int(i) for i in np.unravel_index(worst, det.shape))
            raise RankDeficient(node, float(det.flat[worst]), threshold)
        g_inv = np.linalg.inv(g)
        return cls(g=g, g_inv=0.5 * (g_inv + np.swapaxes(g_inv, -1, -2)), sqrt_det=np.sqrt(det))

    def mean_inverse(self) -> FloatArray:
        """Grid average of g^{-1}, used for constant-coefficient preconditioners."""
        d = self.g.shape[-1]
        return np.asarray(np.mean(self.g_inv.reshape(-1, d, d), axis=0))


@dataclass(frozen=True)
class GeometryCache:
    """Derived geometry of one immersion against a fixed background density."""

    immersion: DiscreteImmersion
    mu: BackgroundDensity
    jacobian: FloatArray
    metric: MetricField
    christoffel: FloatArray
    rho: ScalarField
    second_fund: FloatArray
    mean_curv: TangentField
    tr_s_norm_sq: ScalarField

    @property
    def grid(self) -> ParamGrid:
        """Parameter grid of the immersion."""
        return self.immersion.grid

    def integrate(self, s: ScalarField) -> float:
        """Spectral quadrature of a scalar field against vol(g)."""
        return float(np.sum(s * self.metric.sqrt_det) * self.grid.cell_volume)

    def l2_inner(self, h: TangentField, k: TangentField) -> float:
        """L^2 inner product of two fields along f with respect to vol(g)."""
        return self.integrate(np.sum(h * k, axis=-1))

    def total_volume(self) -> float:
        """Volume of M under the pullback metric."""
        return float(np.sum(self.metric.sqrt_det) * self.grid.cell_volume)

    def length_scale(self) -> float:
        """Typical length of a unit parameter step."""
        d = self.grid.dim
        return float(np.sqrt(np.mean(np.trace(self.metric.g, axis1=-2, axis2=-1)) / d))

    @property
    def is_minimal(self) -> bool:
        """True when the mean curvature vanishes to tolerance everywhere."""
        floor = get_orth_tol() / self.length_scale()
        return float(np.max(np.sqrt(self.tr_s_norm_sq))) <= floor

    def rho_drift(self) -> float:
        """max |rho - 1| over the grid."""
        return float(np.max(np.abs(self.rho - 1.0)))


def _tangent_coefficients(cache_jac: FloatArray, g_inv: FloatArray, v: FloatArray) -> FloatArray:
    """Coefficients c^i with Tf.c the tangential part of v (v has axes [..., a, *rest])."""
    if v.ndim == cache_jac.ndim - 1:
        return np.einsum("...ij,...aj,...a->...i", g_inv, cache_jac, v)
    # second fundamental form: two trailing parameter slots
    return np.einsum("...ij,...aj,...akl->...ikl", g_inv, cache_jac, v)


def _normal_part(jac: FloatArray, g_inv: FloatArray, v: FloatArray) -> FloatArray:
    coeffs = _tangent_coefficients(jac, g_inv, v)
    if coeffs.ndim == jac.ndim - 1:
        return np.asarray(v - np.einsum("...ai,...i->...a", jac, coeffs))
    return np.asarray(v - np.einsum("...ai,...ikl->...akl", jac, coeffs))


def _christoffel(grid: ParamGrid, metric: MetricField) -> FloatArray:
    dg = partials(metric.g, grid)  # [..., i, j, k] = d_k g_ij
    lower = 0.5 * (
        np.einsum("...jli->...lij", dg)
        + np.einsum("...ilj->...lij", dg)
        - np.einsum("...ijl->...lij", dg)
    )
    return np.asarray(np.einsum("...kl,...lij->...kij", metric.g_inv, lower))


def build_geometry(
    f: DiscreteImmersion,
    mu: BackgroundDensity | None = None,
    *,
    rank_eps: float | None = None,
) -> GeometryCache:
    """Compute metric, Christoffel symbols, second fundamental form and mean curvature.

    S is formed as the Christoffel-corrected Hessian ``d_i d_j f - Gamma^k_ij d_k f``
    and then projected onto the normal bundle, which removes the discretization
    residue from its tangential part.

    Args:
        f: The immersion.
        mu: Background density; defaults to the density of f itself (rho = 1).
        rank_eps: Override for the immersion rank threshold.

    Raises:
        RankDeficient: If det g falls below the rank threshold at some node.
    """
    grid = f.grid
    jac = f.jacobian()
    metric = MetricField.from_jacobian(jac, rank_eps)
    if mu is None:
        mu = BackgroundDensity(metric.sqrt_det)
    elif mu.weight.shape != grid.shape:
        raise ValueError("background density does not match the grid")

    christoffel = _christoffel(grid, metric)
    hess = f.second_derivatives()
    raw = hess - np.einsum("...ak,...kij->...aij", jac, christoffel)
    second_fund = _normal_part(jac, metric.g_inv, raw)
    second_fund = 0.5 * (second_fund + np.swapaxes(second_fund, -1, -2))
    mean_curv = np.einsum("...ij,...aij->...a", metric.g_inv, second_fund)

    return GeometryCache(
        immersion=f,
        mu=mu,
        jacobian=jac,
        metric=metric,
        christoffel=christoffel,
        rho=metric.sqrt_det / mu.weight,
        second_fund=second_fund,
        mean_curv=mean_curv,
        tr_s_norm_sq=np.sum(mean_curv**2, axis=-1),
    )


def split_tangent(
    f: DiscreteImmersion, cache: GeometryCache, h: TangentField
) -> tuple[ParamVectorField, TangentField]:
    """Split ``h = Tf.h_top + h_perp`` pointwise."""
    check_tangent(f, h)
    h_top = _tangent_coefficients(cache.jacobian, cache.metric.g_inv, h)
    h_perp = h - np.einsum("...ai,...i->...a", cache.jacobian, h_top)
    return h_top, h_perp


def grad_g(cache: GeometryCache, p: ScalarField) -> ParamVectorField:
    """Riemannian gradient g^{ij} d_j p."""
    return np.asarray(np.einsum("...ij,...j->...i", cache.metric.g_inv, partials(p, cache.grid)))


def div_g(cache: GeometryCache, X: ParamVectorField) -> ScalarField:
    """Riemannian divergence (1/sqrt|g|) d_i (sqrt|g| X^i)."""
    sqrt_det = cache.metric.sqrt_det
    total = np.zeros(cache.grid.shape)
    for i in range(cache.grid.dim):
        total += partial(sqrt_det * X[..., i], cache.grid, i)
    return total / sqrt_det


def laplace_beltrami(cache: GeometryCache, p: ScalarField) -> ScalarField:
    """div_g(grad_g p); nonpositive spectrum."""
    return div_g(cache, grad_g(cache, p))


def constraint_operator(cache: GeometryCache, h: TangentField) -> ScalarField:
    """A_f(h) = div^g(h_top) - <h_perp, Tr^g S>."""
    h_top, h_perp = split_tangent(cache.immersion, cache, h)
    return div_g(cache, h_top) - np.sum(h_perp * cache.mean_curv, axis=-1)


def constraint_adjoint(cache: GeometryCache, p: ScalarField) -> TangentField:
    """A_f*(p) = Tf.grad^g p + p Tr^g S (minus the L^2 adjoint of A_f)."""
    tangential = np.einsum("...ai,...i->...a", cache.jacobian, grad_g(cache, p))
    return np.asarray(tangential + p[..., None] * cache.mean_curv)


def constraint_residual(f: DiscreteImmersion, cache: GeometryCache, h: TangentField) -> ScalarField:
    """Linearized volume-preservation defect of a tangent vector.

    Zero exactly when ``h`` is tangent to the volume-preserving immersions at ``f``.
    The identification assumes rho = 1; a warning is logged otherwise.
    """
    drift = cache.rho_drift()
    if drift > _RHO_WARN_TOL:
        logger.warning(
            "constraint residual requested off the constraint set (|rho-1| = %.3e)", drift
        )
    check_tangent(f, h)
    return constraint_operator(cache, h)


def constraint_residual_trace_form(
    f: DiscreteImmersion, cache: GeometryCache, h: TangentField
) -> ScalarField:
    """The same residual written as Tr^g <nabla h, Tf> = g^{ij} <d_i h, d_j f>."""
    check_tangent(f, h)
    dh = partials(h, cache.grid)
    return np.asarray(np.einsum("...ij,...ai,...aj->...", cache.metric.g_inv, dh, cache.jacobian))
