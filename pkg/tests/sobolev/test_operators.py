"""Tests for L, G^l and Psi."""

import numpy as np
import pytest

from volimm.runner.initial import random_smooth_scalar
from volimm.sobolev.operators import (
    MAX_ORDER,
    apply_L,
    apply_Psi,
    apply_Psi_curve,
    inner_product_Gl,
    invert_L,
    is_constant_speed,
    psi_factorized,
    psi_symbol_probe,
)


def _circle_psi_symbol(k: int, l: int) -> float:
    # Psi cos(k theta) on the unit circle mixes the modes k - 1 and k + 1 of p c'
    a_plus = (k + 1) ** 2 / (1 + (k + 1) ** 2) ** l
    a_minus = (k - 1) ** 2 / (1 + (k - 1) ** 2) ** l
    return -0.5 * (a_plus + a_minus)


class TestSobolevL:
    def test_order_zero_is_identity(self, star_cache, star_field):
        assert np.array_equal(apply_L(star_cache, star_field, 0), star_field)

    def test_order_out_of_range(self, star_cache, star_field):
        with pytest.raises(ValueError, match="Sobolev order"):
            apply_L(star_cache, star_field, MAX_ORDER + 1)

    def test_circle_fourier_mode(self, circle_grid, circle_cache):
        (theta,) = circle_grid.coordinates()
        h = np.stack([np.cos(3 * theta), np.sin(3 * theta)], axis=-1)
        assert np.allclose(apply_L(circle_cache, h, 2), 100.0 * h, atol=1e-8)

    def test_invert_on_constant_speed_curve(self, circle_cache, rng):
        h = rng.standard_normal((64, 2))
        x, stats = invert_L(circle_cache, apply_L(circle_cache, h, 2), 2)
        assert stats.iterations == 0
        assert np.allclose(x, h, atol=1e-8)

    def test_invert_by_cg(self, star_cache, star_field):
        assert not is_constant_speed(star_cache)
        x, stats = invert_L(star_cache, apply_L(star_cache, star_field, 1), 1, tol=1e-12)
        assert stats.iterations > 0
        assert np.max(np.abs(x - star_field)) <= 1e-8 * np.max(np.abs(star_field))

    def test_gl_dominates_l2(self, star_cache, star_field):
        l2 = inner_product_Gl(star_cache, star_field, star_field, 0)
        h1 = inner_product_Gl(star_cache, star_field, star_field, 1)
        assert h1 >= l2 > 0

    def test_gl_symmetric(self, star_cache, star_field, rng):
        k = rng.standard_normal(star_field.shape)
        assert np.isclose(
            inner_product_Gl(star_cache, star_field, k, 3),
            inner_product_Gl(star_cache, k, star_field, 3),
            rtol=1e-10,
        )


class TestPsi:
    def test_factorized_form_agrees(self, star_cache, rng):
        p = random_smooth_scalar(star_cache.grid, rng, 6)
        direct = apply_Psi(star_cache, p, 1, 1e-12)
        composed = psi_factorized(star_cache, p, 1, 1e-12)
        assert np.max(np.abs(direct - composed)) <= 1e-8 * np.max(np.abs(direct))

    @pytest.mark.parametrize("l", [0, 1, 2])
    def test_curve_formula_on_circle(self, circle_cache, circle_grid, l):
        (theta,) = circle_grid.coordinates()
        p = np.cos(2 * theta) + 0.5 * np.sin(5 * theta)
        expected = apply_Psi_curve(circle_cache, p, l)
        assert np.allclose(apply_Psi(circle_cache, p, l), expected, atol=1e-9)

    def test_curve_formula_needs_constant_speed(self, star_cache):
        with pytest.raises(ValueError, match="constant-speed"):
            apply_Psi_curve(star_cache, np.ones(64), 1)

    @pytest.mark.parametrize("l", [0, 1, 2])
    def test_self_adjoint_and_negative(self, star_cache, rng, l):
        p = random_smooth_scalar(star_cache.grid, rng, 6)
        q = random_smooth_scalar(star_cache.grid, rng, 6)
        pq = star_cache.integrate(apply_Psi(star_cache, p, l, 1e-12) * q)
        qp = star_cache.integrate(p * apply_Psi(star_cache, q, l, 1e-12))
        assert abs(pq - qp) <= 1e-8 * max(abs(pq), abs(qp))
        assert star_cache.integrate(apply_Psi(star_cache, p, l, 1e-12) * p) < 0

    @pytest.mark.parametrize("l", [0, 1, 2])
    def test_symbol_on_circle(self, circle_cache, l):
        probe = psi_symbol_probe(circle_cache, l, 4)
        assert np.isclose(probe, _circle_psi_symbol(4, l), rtol=1e-9)

    def test_order_zero_reduces_to_elliptic(self, circle_cache, circle_grid):
        (theta,) = circle_grid.coordinates()
        p = np.cos(3 * theta)
        # Laplace - |TrS|^2 on the unit circle: p'' - p
        assert np.allclose(apply_Psi(circle_cache, p, 0), -10.0 * p, atol=1e-10)

    def test_symbol_probe_rejects_unresolved_mode(self, circle_cache):
        with pytest.raises(ValueError, match="not resolved"):
            psi_symbol_probe(circle_cache, 1, 32)
