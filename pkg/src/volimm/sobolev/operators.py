"""The operators of the Sobolev metrics G^l on fields along an immersion.

``L = (1 - Laplace)^l`` acts componentwise with the scalar Laplace-Beltrami operator
(nonpositive), so L itself is positive-definite and self-adjoint in L^2(vol g).
``Psi = A o L^-1 o A*`` is the Schur complement whose inversion yields the multiplier
of the G^l projection.
"""

import logging
from collections.abc import Callable

import numpy as np

from volimm.config import get_cg_rtol
from volimm.geometry.immersion import FloatArray, ScalarField, TangentField
from volimm.geometry.kernel import (
    GeometryCache,
    constraint_adjoint,
    constraint_operator,
    div_g,
    laplace_beltrami,
)
from volimm.geometry.spectral import apply_multiplier, partial, symbol_multiplier
from volimm.sobolev.krylov import OperatorStats, solve_spd

logger = logging.getLogger(__name__)

MAX_ORDER = 8


def _check_order(l: int) -> None:
    if not 0 <= l <= MAX_ORDER:
        raise ValueError(f"Sobolev order must be within [0, {MAX_ORDER}], got {l}")


def is_constant_speed(cache: GeometryCache, tol: float = 1e-10) -> bool:
    """True for curves whose speed |c'| varies by at most ``tol`` relative."""
    if cache.grid.dim != 1:
        return False
    g = cache.metric.g[..., 0, 0]
    return float(np.max(g) - np.min(g)) <= tol * float(np.mean(g))


def vector_laplacian(cache: GeometryCache, h: TangentField) -> TangentField:
    """Componentwise Laplace-Beltrami of a field along f (flat target)."""
    return np.stack(
        [laplace_beltrami(cache, h[..., a]) for a in range(h.shape[-1])],
        axis=-1,
    )


def apply_L(cache: GeometryCache, h: TangentField, l: int) -> TangentField:
    """Apply ``(1 - Laplace)^l``; l = 0 is the identity."""
    _check_order(l)
    out = np.asarray(h, dtype=np.float64)
    for _ in range(l):
        out = out - vector_laplacian(cache, out)
    return out


def _sobolev_symbol(l: int) -> Callable[[FloatArray], FloatArray]:
    return lambda k_sq: (1.0 + k_sq) ** (-l)


def invert_L(
    cache: GeometryCache, h: TangentField, l: int, tol: float | None = None
) -> tuple[TangentField, OperatorStats]:
    """Solve ``L x = h``.

    Constant-speed curves are diagonal in Fourier space and are inverted exactly.
    Everything else goes through CG in L^2(vol g), preconditioned with the symbol of
    L at the grid-averaged metric.

    Raises:
        NoConvergence: If CG hits its iteration cap.
    """
    _check_order(l)
    if l == 0:
        return np.array(h, dtype=np.float64), OperatorStats.exact()
    tol = tol if tol is not None else get_cg_rtol()
    multiplier = symbol_multiplier(cache.grid, cache.metric.mean_inverse(), _sobolev_symbol(l))

    if is_constant_speed(cache, tol):
        return apply_multiplier(h, cache.grid, multiplier), OperatorStats.exact()

    return solve_spd(
        lambda x: apply_L(cache, x, l),
        h,
        cache.metric.sqrt_det[..., None],
        lambda r: apply_multiplier(r, cache.grid, multiplier),
        rtol=tol,
        what=f"invert_L(l={l})",
    )


def inner_product_Gl(cache: GeometryCache, h: TangentField, k: TangentField, l: int) -> float:
    """G^l(h, k) in the balanced form <L^floor(l/2) h, L^ceil(l/2) k>_{L^2(vol g)}."""
    low = l // 2
    return cache.l2_inner(apply_L(cache, h, low), apply_L(cache, k, l - low))


def apply_Psi(
    cache: GeometryCache, p: ScalarField, l: int, tol: float | None = None
) -> ScalarField:
    """Psi(p) = div((L^-1 (Tf.grad p + p TrS))^T) - <(L^-1 (...))^perp, TrS>.

    Raises:
        NoConvergence: Propagated from the inner L solve.
    """
    jac, g_inv = cache.jacobian, cache.metric.g_inv
    dp = np.stack([partial(p, cache.grid, i) for i in range(cache.grid.dim)], axis=-1)
    force = np.einsum("...ai,...ij,...j->...a", jac, g_inv, dp) + p[..., None] * cache.mean_curv
    y, _ = invert_L(cache, force, l, tol)
    y_top = np.einsum("...ij,...aj,...a->...i", g_inv, jac, y)
    y_perp = y - np.einsum("...ai,...i->...a", jac, y_top)
    return div_g(cache, y_top) - np.sum(y_perp * cache.mean_curv, axis=-1)


def psi_factorized(
    cache: GeometryCache, p: ScalarField, l: int, tol: float | None = None
) -> ScalarField:
    """Psi as the composition A o L^-1 o A* of the named operators."""
    y, _ = invert_L(cache, constraint_adjoint(cache, p), l, tol)
    return constraint_operator(cache, y)


def apply_Psi_curve(cache: GeometryCache, p: ScalarField, l: int) -> ScalarField:
    """Psi on a constant-speed curve: <(1 - d_s^2)^-l d_s^2 (p c_s), c_s>.

    Raises:
        ValueError: If the base is not a constant-speed curve.
    """
    _check_order(l)
    if not is_constant_speed(cache, 1e-8):
        raise ValueError("apply_Psi_curve needs a constant-speed curve")
    grid = cache.grid
    speed = float(np.sqrt(np.mean(cache.metric.g[..., 0, 0])))
    c_s = cache.jacobian[..., 0] / speed
    field = p[..., None] * c_s
    for _ in range(2):
        field = partial(field, grid, 0) / speed
    multiplier = symbol_multiplier(grid, cache.metric.mean_inverse(), _sobolev_symbol(l))
    return np.sum(apply_multiplier(field, grid, multiplier) * c_s, axis=-1)


def psi_symbol_probe(cache: GeometryCache, l: int, k: int, tol: float | None = None) -> float:
    """Empirical Fourier multiplier <Psi p, p> / <p, p> of Psi at mode ``k`` on a curve.

    For large k this approaches ``-k^2 / (1 + k^2)^l`` on the unit circle.
    """
    if cache.grid.dim != 1:
        raise ValueError("symbol probe is defined on curves")
    if not 0 < k < cache.grid.sizes[0] // 2:
        raise ValueError(f"mode {k} not resolved on {cache.grid.sizes[0]} nodes")
    (theta,) = cache.grid.coordinates()
    p = np.cos(k * theta * (2.0 * np.pi / cache.grid.periods[0]))
    psi_p = apply_Psi(cache, p, l, tol)
    return cache.integrate(psi_p * p) / cache.integrate(p * p)


def psi_preconditioner(cache: GeometryCache, l: int) -> FloatArray:
    """Symbol of (-Psi)^-1 at the grid-averaged metric and mean |TrS|^2."""
    shift = float(np.mean(cache.tr_s_norm_sq))

    def symbol(k_sq: FloatArray) -> FloatArray:
        denom = k_sq + shift
        out = np.ones_like(k_sq)
        nonzero = denom > 0
        out[nonzero] = (1.0 + k_sq[nonzero]) ** l / denom[nonzero]
        return out

    return symbol_multiplier(cache.grid, cache.metric.mean_inverse(), symbol)
