"""Velocity and vorticity fields on the flat torus and the Leray projection.

Both fields live on a two-dimensional :class:`~volimm.models.grid.ParamGrid` with
axis 0 as x and axis 1 as y. The harmonic part of a velocity field (its mean) is
carried separately by the vorticity form, since the curl does not see it.
"""

from dataclasses import dataclass

import numpy as np
import scipy.fft

from volimm.geometry.immersion import FloatArray, ScalarField
from volimm.geometry.spectral import partial, rfft_wavenumbers
from volimm.models.grid import ParamGrid


def _check_torus(grid: ParamGrid) -> None:
    if grid.dim != 2:
        raise ValueError("flat-torus fields need a two-dimensional grid")


def _field_mean(s: ScalarField) -> float:
    return float(np.mean(s))


@dataclass(frozen=True)
class VelocityField2D:
    """Velocity components u (along x) and v (along y)."""

    grid: ParamGrid
    u: ScalarField
    v: ScalarField

    def __post_init__(self) -> None:
        """Check shapes and finiteness."""
        _check_torus(self.grid)
        for name, comp in (("u", self.u), ("v", self.v)):
            if comp.shape != self.grid.shape:
                raise ValueError(f"{name} has shape {comp.shape}, grid is {self.grid.shape}")
            if not np.all(np.isfinite(comp)):
                raise ValueError(f"{name} has non-finite entries")

    @classmethod
    def from_tangent(cls, grid: ParamGrid, h: FloatArray) -> "VelocityField2D":
        """Read a tangent field along the identity map (trailing axis of length 2)."""
        return cls(grid=grid, u=np.array(h[..., 0]), v=np.array(h[..., 1]))

    def as_tangent(self) -> FloatArray:
        """Stack into a tangent field of shape grid.shape + (2,)."""
        return np.stack([self.u, self.v], axis=-1)

    def mean_flow(self) -> tuple[float, float]:
        """Spatial mean of (u, v), the harmonic part."""
        return _field_mean(self.u), _field_mean(self.v)

    def max_speed(self) -> float:
        """Sup of |u| over the grid."""
        return float(np.max(np.hypot(self.u, self.v)))


@dataclass(frozen=True)
class VorticityField:
    """Scalar vorticity plus the mean flow it cannot encode.

    ``mean`` is the value the spatial mean of ``omega`` is held at during time stepping.
    """

    grid: ParamGrid
    omega: ScalarField
    mean_flow: tuple[float, float] = (0.0, 0.0)
    mean: float = 0.0

    def __post_init__(self) -> None:
        """Check the shape."""
        _check_torus(self.grid)
        if self.omega.shape != self.grid.shape:
            raise ValueError(f"omega has shape {self.omega.shape}, grid is {self.grid.shape}")
        if not np.all(np.isfinite(self.omega)):
            raise ValueError("omega has non-finite entries")

    @classmethod
    def initial(
        cls, grid: ParamGrid, omega: ScalarField, mean_flow: tuple[float, float] = (0.0, 0.0)
    ) -> "VorticityField":
        """Wrap initial data, recording its mean as the value to hold."""
        return cls(grid=grid, omega=np.array(omega), mean_flow=mean_flow, mean=_field_mean(omega))

    def with_omega(self, omega: ScalarField) -> "VorticityField":
        """Same mean flow and held mean, new vorticity values."""
        return VorticityField(self.grid, omega, self.mean_flow, self.mean)


def divergence(field: VelocityField2D) -> ScalarField:
    """Spectral divergence du/dx + dv/dy."""
    return partial(field.u, field.grid, 0) + partial(field.v, field.grid, 1)


def _rfft2(s: ScalarField) -> FloatArray:
    return np.asarray(scipy.fft.rfftn(s, axes=(0, 1)))


def _irfft2(coeffs: FloatArray, grid: ParamGrid) -> ScalarField:
    return np.asarray(scipy.fft.irfftn(coeffs, s=grid.sizes, axes=(0, 1)), dtype=np.float64)


def _k_squared(grid: ParamGrid) -> tuple[FloatArray, FloatArray, FloatArray]:
    kx, ky = rfft_wavenumbers(grid)
    k_sq = kx * kx + ky * ky
    return kx, ky, np.broadcast_to(k_sq, (grid.sizes[0], grid.sizes[1] // 2 + 1))


def gradient_potential(field: VelocityField2D) -> ScalarField:
    """The zero-mean phi with Fourier coefficients -i (k . u_hat) / |k|^2."""
    kx, ky, k_sq = _k_squared(field.grid)
    flux = kx * _rfft2(field.u) + ky * _rfft2(field.v)
    phi_hat = np.zeros_like(flux)
    nonzero = k_sq > 0
    phi_hat[nonzero] = -1j * flux[nonzero] / k_sq[nonzero]
    return _irfft2(phi_hat, field.grid)


def leray_project(field: VelocityField2D) -> VelocityField2D:
    """Divergence-free part of a velocity field (Helmholtz-Hodge on the torus).

    Idempotent, and the mean flow is kept.
    """
    kx, ky, k_sq = _k_squared(field.grid)
    u_hat, v_hat = _rfft2(field.u), _rfft2(field.v)
    flux = kx * u_hat + ky * v_hat
    scale = np.zeros(k_sq.shape)
    nonzero = k_sq > 0
    scale[nonzero] = 1.0 / k_sq[nonzero]
    u_hat = u_hat - kx * flux * scale
    v_hat = v_hat - ky * flux * scale
    return VelocityField2D(
        grid=field.grid, u=_irfft2(u_hat, field.grid), v=_irfft2(v_hat, field.grid)
    )


def vorticity_from_velocity(field: VelocityField2D) -> VorticityField:
    """omega = dv/dx - du/dy, keeping the mean flow aside."""
    omega = partial(field.v, field.grid, 0) - partial(field.u, field.grid, 1)
    return VorticityField.initial(field.grid, omega, field.mean_flow())


def velocity_from_vorticity(field: VorticityField) -> VelocityField2D:
    """Streamfunction solve ``-Laplace psi = omega``; u = dpsi/dy + U, v = -dpsi/dx + V."""
    grid = field.grid
    kx, ky, k_sq = _k_squared(grid)
    psi_hat = _rfft2(field.omega)
    nonzero = k_sq > 0
    psi_hat[nonzero] /= k_sq[nonzero]
    psi_hat[~nonzero] = 0.0
    u = _irfft2(1j * ky * psi_hat, grid) + field.mean_flow[0]
    v = _irfft2(-1j * kx * psi_hat, grid) + field.mean_flow[1]
    return VelocityField2D(grid=grid, u=u, v=v)


def kinetic_energy(field: VelocityField2D) -> float:
    """1/2 of the integral of |u|^2."""
    return 0.5 * float(np.sum(field.u**2 + field.v**2)) * field.grid.cell_volume


def enstrophy(field: VorticityField) -> float:
    """1/2 of the integral of omega^2."""
    return 0.5 * float(np.sum(field.omega**2)) * field.grid.cell_volume
