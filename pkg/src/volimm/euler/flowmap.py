"""Lagrangian flow maps of torus velocity fields.

A flow map is a :class:`~volimm.geometry.immersion.DiscreteImmersion` of T^2 into the
flat torus with winding one along each axis; its points are the lifted positions of
the fluid particles that started at the grid nodes.
"""

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
import scipy.fft

from volimm.euler.fields import VelocityField2D
from volimm.geometry.immersion import DiscreteImmersion, FloatArray, ScalarField, TargetKind
from volimm.models.grid import ParamGrid

logger = logging.getLogger(__name__)

# Fourier coefficients below this fraction of the largest are trimmed from the band
_BAND_RTOL = 1e-15


@dataclass(frozen=True)
class FourierInterpolant:
    """Trigonometric interpolant of a periodic scalar field, evaluable anywhere.

    Only the band of modes that carry significant energy is kept, and evaluation is
    separable in x and y.
    """

    coeffs: FloatArray
    k0: FloatArray
    k1: FloatArray

    @classmethod
    def from_samples(cls, grid: ParamGrid, s: ScalarField) -> "FourierInterpolant":
        """Build from samples on a two-dimensional grid."""
        if grid.dim != 2 or s.shape != grid.shape:
            raise ValueError("FourierInterpolant needs samples on a two-dimensional grid")
        n0, n1 = grid.sizes
        coeffs = scipy.fft.fft2(s) / (n0 * n1)
        coeffs[n0 // 2, :] = 0.0
        coeffs[:, n1 // 2] = 0.0
        m0 = scipy.fft.fftfreq(n0, d=1.0 / n0)
        m1 = scipy.fft.fftfreq(n1, d=1.0 / n1)

        magnitude = np.abs(coeffs)
        significant = magnitude > _BAND_RTOL * max(float(np.max(magnitude)), 1e-300)
        rows, cols = np.nonzero(significant)
        band0 = int(np.max(np.abs(m0[rows]))) if rows.size else 0
        band1 = int(np.max(np.abs(m1[cols]))) if cols.size else 0
        keep0 = np.abs(m0) <= band0
        keep1 = np.abs(m1) <= band1
        return cls(
            coeffs=coeffs[np.ix_(keep0, keep1)],
            k0=m0[keep0] * (2.0 * np.pi / grid.periods[0]),
            k1=m1[keep1] * (2.0 * np.pi / grid.periods[1]),
        )

    def __call__(self, x: FloatArray, y: FloatArray) -> FloatArray:
        """Evaluate at points (x, y) of any matching shape."""
        shape = np.shape(x)
        e0 = np.exp(1j * np.ravel(x)[:, None] * self.k0[None, :])
        e1 = np.exp(1j * np.ravel(y)[:, None] * self.k1[None, :])
        values = np.einsum("pa,ab,pb->p", e0, self.coeffs, e1)
        return np.asarray(values.real.reshape(shape), dtype=np.float64)


def identity_flow_map(grid: ParamGrid) -> DiscreteImmersion:
    """The identity of T^2 as a flow map."""
    if grid.dim != 2:
        raise ValueError("flow maps live on a two-dimensional grid")
    x, y = grid.coordinates()
    return DiscreteImmersion(
        grid=grid,
        points=np.stack([x, y], axis=-1),
        target_kind=TargetKind.FLAT_TORUS,
        torus_periods=grid.periods,
    )


def flow_map_density(f: DiscreteImmersion) -> ScalarField:
    """rho of a flow map against the parameter measure: |det Df|."""
    return np.abs(np.linalg.det(f.jacobian()))


VelocityAt = Callable[[float], VelocityField2D]


def advect_flowmap(
    f: DiscreteImmersion, velocity_at: VelocityAt, t: float, dt: float
) -> DiscreteImmersion:
    """Advance particle positions by one RK4 step of dx/dt = u(x, t).

    ``velocity_at`` is sampled at t, t + dt/2 and t + dt; velocities are evaluated at the
    stage positions by spectral interpolation.
    """
    interpolants: dict[float, tuple[FourierInterpolant, FourierInterpolant]] = {}
    for s in (t, t + 0.5 * dt, t + dt):
        velocity = velocity_at(s)
        interpolants[s] = (
            FourierInterpolant.from_samples(velocity.grid, velocity.u),
            FourierInterpolant.from_samples(velocity.grid, velocity.v),
        )

    def rate(s: float, pts: FloatArray) -> FloatArray:
        u, v = interpolants[s]
        return np.stack([u(pts[..., 0], pts[..., 1]), v(pts[..., 0], pts[..., 1])], axis=-1)

    x0 = f.points
    k1 = rate(t, x0)
    k2 = rate(t + 0.5 * dt, x0 + 0.5 * dt * k1)
    k3 = rate(t + 0.5 * dt, x0 + 0.5 * dt * k2)
    k4 = rate(t + dt, x0 + dt * k3)
    moved = f.displaced((k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0, dt)
    if logger.isEnabledFor(logging.DEBUG):
        drift = float(np.max(np.abs(flow_map_density(moved) - 1.0)))
        logger.debug("flow map at t=%.6g: |rho-1| = %.3e", t + dt, drift)
    return moved
