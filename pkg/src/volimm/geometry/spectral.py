"""Fourier pseudo-spectral differentiation on uniform periodic grids.

Fields carry the grid axes first and any component axes after them. The Nyquist
mode is dropped from odd derivatives so that the discrete derivative is exactly
skew-adjoint under the trapezoidal sum.
"""

from collections.abc import Callable
from functools import lru_cache

import numpy as np
import scipy.fft
from numpy.typing import NDArray

from volimm.models.grid import ParamGrid

FloatArray = NDArray[np.float64]


@lru_cache(maxsize=64)
def derivative_wavenumbers(size: int, period: float) -> FloatArray:
    """Angular wavenumbers of an rfft along one axis, Nyquist zeroed."""
    k = np.arange(size // 2 + 1, dtype=np.float64) * (2.0 * np.pi / period)
    if size % 2 == 0:
        k[-1] = 0.0
    k.setflags(write=False)
    return k


@lru_cache(maxsize=64)
def full_wavenumbers(size: int, period: float) -> FloatArray:
    """Angular wavenumbers of a full fft along one axis, Nyquist zeroed."""
    k = scipy.fft.fftfreq(size, d=period / (2.0 * np.pi * size))
    if size % 2 == 0:
        k[size // 2] = 0.0
    k.setflags(write=False)
    return np.asarray(k, dtype=np.float64)


def _along(k: FloatArray, axis: int, ndim: int) -> FloatArray:
    shape = [1] * ndim
    shape[axis] = k.size
    return k.reshape(shape)


def partial(field: FloatArray, grid: ParamGrid, axis: int) -> FloatArray:
    """Spectral derivative of a periodic field along one grid axis."""
    size, period = grid.sizes[axis], grid.periods[axis]
    coeffs = scipy.fft.rfft(field, axis=axis)
    coeffs *= 1j * _along(derivative_wavenumbers(size, period), axis, field.ndim)
    return np.asarray(scipy.fft.irfft(coeffs, n=size, axis=axis), dtype=np.float64)


def partials(field: FloatArray, grid: ParamGrid) -> FloatArray:
    """All first partial derivatives, stacked on a new trailing axis."""
    return np.stack([partial(field, grid, axis) for axis in range(grid.dim)], axis=-1)


def rfft_wavenumbers(grid: ParamGrid) -> tuple[FloatArray, ...]:
    """Broadcastable wavenumber arrays matching the layout of ``rfftn`` over the grid axes."""
    ks: list[FloatArray] = []
    for axis, (size, period) in enumerate(zip(grid.sizes, grid.periods, strict=True)):
        if axis == grid.dim - 1:
            k = derivative_wavenumbers(size, period)
        else:
            k = full_wavenumbers(size, period)
        ks.append(_along(k, axis, grid.dim))
    return tuple(ks)


def apply_multiplier(field: FloatArray, grid: ParamGrid, multiplier: FloatArray) -> FloatArray:
    """Multiply a field by a real Fourier multiplier laid out like ``rfft_wavenumbers``.

    Trailing component axes of ``field`` are broadcast over.
    """
    axes = tuple(range(grid.dim))
    coeffs = scipy.fft.rfftn(field, axes=axes)
    extra = field.ndim - grid.dim
    coeffs *= multiplier.reshape(multiplier.shape + (1,) * extra)
    return np.asarray(scipy.fft.irfftn(coeffs, s=grid.sizes, axes=axes), dtype=np.float64)


def symbol_multiplier(
    grid: ParamGrid, g_inv_mean: FloatArray, symbol: Callable[[FloatArray], FloatArray]
) -> FloatArray:
    """Evaluate ``symbol(|k|^2_g)`` for a constant inverse metric on the rfft layout."""
    ks = rfft_wavenumbers(grid)
    k_sq = sum(
        (g_inv_mean[i, j] * ks[i] * ks[j] for i in range(grid.dim) for j in range(grid.dim)),
        start=np.zeros((1,) * grid.dim),
    )
    return symbol(np.broadcast_to(k_sq, _rfft_shape(grid)).astype(np.float64))


def _rfft_shape(grid: ParamGrid) -> tuple[int, ...]:
    return (*grid.sizes[:-1], grid.sizes[-1] // 2 + 1)


@lru_cache(maxsize=16)
def dealias_mask(sizes: tuple[int, ...]) -> FloatArray:
    """Keep modes with |m| < N/3 along each axis, laid out like ``rfftn``."""
    ndim = len(sizes)
    keep = np.ones((1,) * ndim, dtype=bool)
    for axis, size in enumerate(sizes):
        if axis == ndim - 1:
            m = np.arange(size // 2 + 1, dtype=np.float64)
        else:
            m = np.abs(scipy.fft.fftfreq(size, d=1.0 / size))
        keep = keep & (_along(m, axis, ndim) < size / 3.0)
    mask = keep.astype(np.float64)
    mask.setflags(write=False)
    return mask


def dealias(field: FloatArray, grid: ParamGrid) -> FloatArray:
    """Two-thirds truncation of a periodic field (component axes broadcast)."""
    return apply_multiplier(field, grid, dealias_mask(tuple(grid.sizes)))


@lru_cache(maxsize=16)
def differentiation_matrix(size: int, period: float) -> FloatArray:
    """Dense first-derivative matrix, identical in action to :func:`partial`."""
    grid = ParamGrid.circle(size, period)
    matrix = partial(np.eye(size), grid, axis=0)
    matrix.setflags(write=False)
    return matrix
