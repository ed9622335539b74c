"""Periodic parameter grids."""

import math
from typing import Any

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

TWO_PI = 2.0 * math.pi

# Spectral differentiation needs an even number of samples and a few modes to resolve
MIN_SAMPLES = 8


class ParamGrid(BaseModel):
    """Uniform periodic grid over S^1 (dim 1) or T^2 (dim 2)."""

    model_config = ConfigDict(frozen=True)

    dim: int = Field(ge=1, le=2)
    sizes: tuple[int, ...]
    periods: tuple[float, ...] = ()

    @model_validator(mode="before")
    @classmethod
    def _default_periods(cls, data: Any) -> Any:
        if isinstance(data, dict) and not data.get("periods") and "dim" in data:
            data = {**data, "periods": (TWO_PI,) * int(data["dim"])}
        return data

    @model_validator(mode="after")
    def _check_sizes(self) -> "ParamGrid":
        if len(self.sizes) != self.dim or len(self.periods) != self.dim:
            raise ValueError(f"sizes and periods must have length {self.dim}")
        for size in self.sizes:
            if size < MIN_SAMPLES or size % 2:
                raise ValueError(f"grid sizes must be even and >= {MIN_SAMPLES}, got {size}")
        if any(p <= 0 for p in self.periods):
            raise ValueError("periods must be positive")
        return self

    @classmethod
    def circle(cls, size: int, period: float = TWO_PI) -> "ParamGrid":
        """One-dimensional grid on S^1."""
        return cls(dim=1, sizes=(size,), periods=(period,))

    @classmethod
    def torus(cls, size1: int, size2: int | None = None, period: float = TWO_PI) -> "ParamGrid":
        """Two-dimensional grid on T^2."""
        return cls(dim=2, sizes=(size1, size2 or size1), periods=(period, period))

    @property
    def shape(self) -> tuple[int, ...]:
        """Array shape of a scalar field on this grid."""
        return self.sizes

    @property
    def node_count(self) -> int:
        """Total number of grid nodes."""
        return math.prod(self.sizes)

    @property
    def spacing(self) -> tuple[float, ...]:
        """Node spacing per direction."""
        return tuple(p / n for p, n in zip(self.periods, self.sizes, strict=True))

    @property
    def cell_volume(self) -> float:
        """Parameter-space volume of one grid cell."""
        return math.prod(self.spacing)

    def coordinates(self) -> tuple[NDArray[np.float64], ...]:
        """Node coordinates, one array of grid shape per direction."""
        axes = [
            np.arange(n, dtype=np.float64) * h
            for n, h in zip(self.sizes, self.spacing, strict=True)
        ]
        return tuple(np.meshgrid(*axes, indexing="ij"))
