"""Explicitly assembled operators.

Fields are flattened in C order, so a tangent field of shape ``grid.shape + (n,)`` maps to
index ``node * n + a``. Column assembly works for any grid; curves additionally have a
fast path built from the spectral differentiation matrix.
"""

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from volimm.geometry.immersion import FloatArray, TangentField
from volimm.geometry.kernel import (
    GeometryCache,
    constraint_adjoint,
    constraint_operator,
    laplace_beltrami,
)
from volimm.geometry.spectral import differentiation_matrix
from volimm.sobolev.operators import apply_L


def assemble(op: Callable[[FloatArray], FloatArray], in_shape: tuple[int, ...]) -> FloatArray:
    """Matrix of a linear field map, one unit vector at a time."""
    size = int(np.prod(in_shape))
    columns = []
    for j in range(size):
        unit = np.zeros(size)
        unit[j] = 1.0
        columns.append(np.ravel(op(unit.reshape(in_shape))))
    return np.stack(columns, axis=1)


@dataclass(frozen=True)
class CurveOperators:
    """Dense Laplacian, A, A*, L and the trace-form residual on a curve.

    ``trace_form`` is ``g^-1 <D h, c'>``, the exact derivative of the sampled volume
    density divided by sqrt g; ``constraint`` is the divergence form of the same map and
    differs from it in the modes the product rule aliases.
    """

    laplacian: FloatArray
    constraint: FloatArray
    adjoint: FloatArray
    trace_form: FloatArray
    n: int

    @classmethod
    def from_cache(cls, cache: GeometryCache) -> "CurveOperators":
        """Build the matrices for a curve geometry."""
        if cache.grid.dim != 1:
            raise ValueError("CurveOperators needs a curve")
        size, period = cache.grid.sizes[0], cache.grid.periods[0]
        D = differentiation_matrix(size, period)
        s = cache.metric.sqrt_det
        g_inv = cache.metric.g_inv[:, 0, 0]
        c_prime = cache.jacobian[..., 0]
        tr_s = cache.mean_curv
        n = c_prime.shape[-1]

        laplacian = (D * (s * g_inv)[None, :]) @ D / s[:, None]

        # A(X)_i = (1/s_i) D_ij s_j g^-1_j <c'_j, X_j> - <X_i, N_i>
        # with N_i = TrS_i - g^-1_i <c'_i, TrS_i> c'_i
        div_part = (D * (s * g_inv)[None, :] / s[:, None])[:, :, None] * c_prime[None, :, :]
        normal_dot = tr_s - (g_inv * np.sum(c_prime * tr_s, axis=-1))[:, None] * c_prime
        constraint = div_part.copy()
        idx = np.arange(size)
        constraint[idx, idx, :] -= normal_dot

        # A*(p)_{i,a} = c'_{i,a} g^-1_i D_ij p_j + delta_ij TrS_{i,a} p_j
        adjoint = (c_prime * g_inv[:, None])[:, :, None] * D[:, None, :]
        adjoint[idx, :, idx] += tr_s

        # T(X)_i = g^-1_i <c'_i, D_ij X_j>
        trace_form = (c_prime * g_inv[:, None])[:, None, :] * D[:, :, None]

        return cls(
            laplacian=laplacian,
            constraint=constraint.reshape(size, size * n),
            adjoint=adjoint.reshape(size * n, size),
            trace_form=trace_form.reshape(size, size * n),
            n=n,
        )

    def sobolev(self, l: int) -> FloatArray:
        """Matrix of (1 - Laplace)^l acting componentwise."""
        size = self.laplacian.shape[0]
        scalar = np.linalg.matrix_power(np.eye(size) - self.laplacian, l)
        return np.kron(scalar, np.eye(self.n))

    def elliptic(self, tr_s_norm_sq: FloatArray) -> FloatArray:
        """Matrix of Laplace - |TrS|^2."""
        return self.laplacian - np.diag(tr_s_norm_sq)

    def psi(self, l: int) -> FloatArray:
        """Matrix of A L^-1 A*."""
        if l == 0:
            return self.constraint @ self.adjoint
        return self.constraint @ scipy.linalg.solve(self.sobolev(l), self.adjoint)


def dense_constraint_operator(cache: GeometryCache) -> FloatArray:
    """Column-assembled matrix of A_f (nodes x nodes*n)."""
    shape = cache.immersion.points.shape
    return assemble(lambda h: constraint_operator(cache, h), shape)


def dense_adjoint(cache: GeometryCache) -> FloatArray:
    """Column-assembled matrix of A_f* (nodes*n x nodes)."""
    return assemble(lambda p: constraint_adjoint(cache, p), cache.grid.shape)


def dense_sobolev(cache: GeometryCache, l: int) -> FloatArray:
    """Column-assembled matrix of L."""
    return assemble(lambda h: apply_L(cache, h, l), cache.immersion.points.shape)


def dense_elliptic(cache: GeometryCache) -> FloatArray:
    """Column-assembled matrix of Laplace - |TrS|^2."""
    return assemble(
        lambda p: laplace_beltrami(cache, p) - cache.tr_s_norm_sq * p,
        cache.grid.shape,
    )


def dense_psi(cache: GeometryCache, l: int) -> FloatArray:
    """Matrix of Psi = A L^-1 A*, using the curve fast path when available."""
    if cache.grid.dim == 1:
        return CurveOperators.from_cache(cache).psi(l)
    A = dense_constraint_operator(cache)
    A_star = dense_adjoint(cache)
    if l == 0:
        return A @ A_star
    return A @ scipy.linalg.solve(dense_sobolev(cache, l), A_star)


def dense_project(
    cache: GeometryCache, X: TangentField, l: int = 0
) -> tuple[TangentField, FloatArray]:
    """Reference projection by direct dense solves; returns (h_mu, p).

    The minimal branch (l = 0 only) is solved in the least-squares sense and gauged to zero
    mean.
    """
    if cache.grid.dim == 1:
        ops = CurveOperators.from_cache(cache)
        A, A_star = ops.constraint, ops.adjoint
        L = ops.sobolev(l) if l else None
    else:
        A, A_star = dense_constraint_operator(cache), dense_adjoint(cache)
        L = dense_sobolev(cache, l) if l else None

    x = X.ravel()
    rhs = A @ x
    kick = A_star if L is None else scipy.linalg.solve(L, A_star)
    system = A @ kick
    if cache.is_minimal:
        p = np.linalg.lstsq(system, rhs, rcond=None)[0]
        weight = cache.metric.sqrt_det.ravel()
        p -= np.sum(p * weight) / np.sum(weight)
    else:
        p = scipy.linalg.solve(system, rhs)
    h_mu = x - kick @ p
    return h_mu.reshape(X.shape), p.reshape(cache.grid.shape)
