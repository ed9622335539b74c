"""Sampled immersions, background densities and field type aliases."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np
from numpy.typing import NDArray

from volimm.geometry.spectral import partials
from volimm.models.grid import TWO_PI, ParamGrid

FloatArray = NDArray[np.float64]

# Shapes, with G = grid.shape:
#   ScalarField       G
#   TangentField      G + (n,)      vector along f
#   ParamVectorField  G + (d,)      vector field on M
ScalarField = FloatArray
TangentField = FloatArray
ParamVectorField = FloatArray


class TargetKind(StrEnum):
    """Flat target manifold."""

    EUCLIDEAN = "euclidean"
    FLAT_TORUS = "flat_torus"


def _frozen(array: FloatArray) -> FloatArray:
    out = np.array(array, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class DiscreteImmersion:
    """A map from a periodic parameter grid into R^n or the flat torus.

    Torus-valued maps are stored as lifts: ``points - linear_part()`` is periodic,
    where the linear part carries the winding of the map. Tangent fields along
    either kind are plain periodic R^n-valued arrays.
    """

    grid: ParamGrid
    points: FloatArray
    target_kind: TargetKind = TargetKind.EUCLIDEAN
    torus_periods: tuple[float, ...] | None = None
    winding: FloatArray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        """Validate shapes, freeze arrays and fill torus defaults."""
        points = np.asarray(self.points, dtype=np.float64)
        if points.shape[:-1] != self.grid.shape or points.ndim != self.grid.dim + 1:
            raise ValueError(f"points shape {points.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(points)):
            raise ValueError("immersion has non-finite entries")
        object.__setattr__(self, "points", _frozen(points))

        n = points.shape[-1]
        if self.target_kind is TargetKind.FLAT_TORUS:
            periods = self.torus_periods or (TWO_PI,) * n
            if len(periods) != n:
                raise ValueError("torus_periods must have one entry per target dimension")
            winding = self.winding
            if winding is None:
                winding = np.eye(n, self.grid.dim)
            object.__setattr__(self, "torus_periods", tuple(float(p) for p in periods))
            object.__setattr__(self, "winding", _frozen(np.asarray(winding)))
        elif self.winding is not None or self.torus_periods is not None:
            raise ValueError("winding and torus_periods only apply to flat_torus targets")

    @property
    def target_dim(self) -> int:
        """Dimension n of the target."""
        return int(self.points.shape[-1])

    def slopes(self) -> FloatArray:
        """Constant part of the Jacobian, shape (n, d); zero for euclidean targets."""
        n, d = self.target_dim, self.grid.dim
        if self.winding is None or self.torus_periods is None:
            return np.zeros((n, d))
        periods = np.asarray(self.torus_periods)[:, None]
        return np.asarray(self.winding * periods / np.asarray(self.grid.periods)[None, :])

    def linear_part(self) -> TangentField:
        """Winding contribution to the lift."""
        coords = self.grid.coordinates()
        slopes = self.slopes()
        out = np.zeros(self.points.shape)
        for i, x in enumerate(coords):
            out += x[..., None] * slopes[:, i]
        return out

    def periodic_part(self) -> TangentField:
        """The periodic displacement ``points - linear_part()``."""
        return np.asarray(self.points - self.linear_part())

    def jacobian(self) -> FloatArray:
        """Tf as an array of shape grid.shape + (n, d)."""
        return np.asarray(partials(self.periodic_part(), self.grid) + self.slopes())

    def second_derivatives(self) -> FloatArray:
        """Symmetrized second partials, shape grid.shape + (n, d, d)."""
        hess = partials(self.jacobian(), self.grid)
        return np.asarray(0.5 * (hess + np.swapaxes(hess, -1, -2)))

    def displaced(self, h: TangentField, scale: float = 1.0) -> DiscreteImmersion:
        """The immersion ``f + scale * h`` with the same target."""
        check_tangent(self, h)
        return DiscreteImmersion(
            grid=self.grid,
            points=self.points + scale * h,
            target_kind=self.target_kind,
            torus_periods=self.torus_periods,
            winding=self.winding,
        )

    def wrapped(self) -> FloatArray:
        """Points reduced into the fundamental domain of the torus (copy for R^n)."""
        if self.torus_periods is None:
            return np.array(self.points)
        return np.asarray(np.mod(self.points, np.asarray(self.torus_periods)))


def check_tangent(f: DiscreteImmersion, h: FloatArray) -> None:
    """Raise ValueError unless ``h`` is a tangent field along ``f``."""
    if h.shape != f.points.shape:
        raise ValueError(f"tangent field shape {h.shape} does not match {f.points.shape}")


@dataclass(frozen=True)
class BackgroundDensity:
    """Fixed volume density mu, stored as a positive weight per unit parameter volume."""

    weight: ScalarField

    def __post_init__(self) -> None:
        """Reject non-positive or non-finite weights."""
        weight = np.asarray(self.weight, dtype=np.float64)
        if not np.all(np.isfinite(weight)) or np.any(weight <= 0):
            raise ValueError("background density must be positive and finite")
        object.__setattr__(self, "weight", _frozen(weight))

    @classmethod
    def uniform(cls, grid: ParamGrid, value: float = 1.0) -> BackgroundDensity:
        """Constant density."""
        return cls(np.full(grid.shape, value))

    @classmethod
    def from_immersion(cls, f: DiscreteImmersion) -> BackgroundDensity:
        """The density of vol(f*g), so that rho(f) is identically one."""
        from volimm.geometry.variations import volume_density

        return cls(volume_density(f))

    @classmethod
    def arc_length_normalized(cls, f: DiscreteImmersion) -> BackgroundDensity:
        """Uniform density with the same total mass as vol(f*g).

        For constant-speed curves this is the ``(l_c / period) d theta`` choice and
        coincides with :meth:`from_immersion`.
        """
        from volimm.geometry.variations import volume_density

        density = volume_density(f)
        return cls.uniform(f.grid, float(np.mean(density)))

    def total_mass(self, grid: ParamGrid) -> float:
        """Integral of mu over the parameter domain."""
        return float(np.sum(self.weight) * grid.cell_volume)
