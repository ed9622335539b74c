"""Tests for spectral differentiation."""

import numpy as np
import pytest

from volimm.geometry.spectral import (
    apply_multiplier,
    dealias,
    dealias_mask,
    derivative_wavenumbers,
    differentiation_matrix,
    full_wavenumbers,
    partial,
    partials,
    rfft_wavenumbers,
)
from volimm.models.grid import ParamGrid


class TestWavenumbers:
    def test_nyquist_dropped_rfft(self):
        k = derivative_wavenumbers(16, 2 * np.pi)
        assert k.shape == (9,)
        assert k[-1] == 0.0
        assert k[3] == 3.0

    def test_nyquist_dropped_full(self):
        k = full_wavenumbers(16, 2 * np.pi)
        assert k[8] == 0.0
        assert k[15] == -1.0

    def test_period_scaling(self):
        k = derivative_wavenumbers(16, 1.0)
        assert np.isclose(k[1], 2 * np.pi)

    def test_rfft_layout_2d(self):
        kx, ky = rfft_wavenumbers(ParamGrid.torus(16, 8))
        assert kx.shape == (16, 1)
        assert ky.shape == (1, 5)


class TestPartial:
    def test_sine_derivative(self):
        grid = ParamGrid.circle(32)
        (x,) = grid.coordinates()
        assert np.allclose(partial(np.sin(3 * x), grid, 0), 3 * np.cos(3 * x), atol=1e-12)

    def test_component_axes_broadcast(self):
        grid = ParamGrid.circle(32)
        (x,) = grid.coordinates()
        field = np.stack([np.cos(x), np.sin(2 * x)], axis=-1)
        d = partial(field, grid, 0)
        assert np.allclose(d[:, 0], -np.sin(x), atol=1e-12)
        assert np.allclose(d[:, 1], 2 * np.cos(2 * x), atol=1e-12)

    def test_partials_on_torus(self):
        grid = ParamGrid.torus(16)
        x, y = grid.coordinates()
        d = partials(np.sin(x) * np.cos(2 * y), grid)
        assert d.shape == (16, 16, 2)
        assert np.allclose(d[..., 0], np.cos(x) * np.cos(2 * y), atol=1e-12)
        assert np.allclose(d[..., 1], -2 * np.sin(x) * np.sin(2 * y), atol=1e-12)

    def test_constant_has_zero_derivative(self):
        grid = ParamGrid.circle(16)
        assert np.allclose(partial(np.full(16, 3.0), grid, 0), 0.0, atol=1e-14)


class TestDifferentiationMatrix:
    def test_matches_partial(self, rng):
        grid = ParamGrid.circle(24)
        field = rng.standard_normal(24)
        D = differentiation_matrix(24, grid.periods[0])
        assert np.allclose(D @ field, partial(field, grid, 0), atol=1e-12)

    def test_skew_symmetric(self):
        D = differentiation_matrix(16, 2 * np.pi)
        assert np.allclose(D, -D.T, atol=1e-12)


def test_unit_multiplier_is_identity(rng):
    grid = ParamGrid.torus(16)
    field = rng.standard_normal((16, 16, 3))
    ones = np.ones((16, 9))
    assert np.allclose(apply_multiplier(field, grid, ones), field, atol=1e-12)


class TestDealias:
    def test_mask_layout(self):
        mask = dealias_mask((64, 64))
        assert mask.shape == (64, 33)
        assert mask[0, 21] == 1.0
        assert mask[0, 22] == 0.0
        assert mask[21, 0] == 1.0
        assert mask[-21, 0] == 1.0
        assert mask[22, 0] == 0.0

    def test_curve_mask(self):
        mask = dealias_mask((12,))
        assert mask.tolist() == [1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0]

    def test_read_only(self):
        with pytest.raises(ValueError):
            dealias_mask((32, 32))[0, 0] = 0.0

    def test_keeps_low_modes_drops_high(self):
        grid = ParamGrid.circle(32)
        (theta,) = grid.coordinates()
        low = np.stack([np.cos(3 * theta), np.sin(10 * theta)], axis=-1)
        high = np.cos(12 * theta)[:, None] * np.ones(2)
        np.testing.assert_allclose(dealias(low + high, grid), low, atol=1e-13)
