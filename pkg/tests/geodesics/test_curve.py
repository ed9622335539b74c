"""Tests for the explicit L^2 curve geodesic and its rotation oracle."""

import numpy as np
import pytest

from volimm.geodesics.curve import (
    multiplier_rhs,
    rhs_l2_curve,
    rotation_oracle,
    step_rk4_explicit,
    unit_circle,
)
from volimm.geodesics.state import GeodesicState, energy, reverse
from volimm.geometry.kernel import build_geometry, constraint_operator


class TestRotationOracle:
    def test_on_constraint(self, circle_grid):
        state = rotation_oracle(circle_grid, 2.0, 0.3)
        cache = build_geometry(state.f)
        assert np.allclose(constraint_operator(cache, state.f_t), 0.0, atol=1e-10)
        assert np.allclose(state.p, 4.0)

    def test_phase(self, circle_grid):
        state = rotation_oracle(circle_grid, 1.0, np.pi / 2)
        assert np.allclose(state.f.points, unit_circle(circle_grid, np.pi / 2).points)
        assert state.t == np.pi / 2

    def test_energy(self, circle_grid):
        state = rotation_oracle(circle_grid, 3.0, 0.0)
        assert np.isclose(energy(build_geometry(state.f), state.f_t), 9.0 * 2 * np.pi)


class TestRhs:
    def test_rotation_acceleration(self, circle_grid):
        state = rotation_oracle(circle_grid, 1.5, 0.0)
        accel, p = rhs_l2_curve(state)
        assert np.allclose(p, 2.25, atol=1e-10)
        assert np.allclose(accel, -2.25 * state.f.points, atol=1e-10)

    def test_multiplier_source(self, circle_grid):
        state = rotation_oracle(circle_grid, 2.0, 0.0)
        source = multiplier_rhs(build_geometry(state.f), state.f_t)
        assert np.allclose(source, -4.0, atol=1e-10)

    def test_surface_rejected(self, torus_surface):
        state = GeodesicState(f=torus_surface, f_t=np.zeros(torus_surface.points.shape))
        with pytest.raises(ValueError, match="curves"):
            rhs_l2_curve(state)


class TestRK4:
    def test_one_step_against_oracle(self, circle_grid):
        state = rotation_oracle(circle_grid, 1.0, 0.0)
        stepped = step_rk4_explicit(state, 1e-2)
        exact = rotation_oracle(circle_grid, 1.0, 1e-2)
        assert np.isclose(stepped.t, 1e-2)
        assert np.max(np.abs(stepped.f.points - exact.f.points)) <= 1e-9
        assert np.max(np.abs(stepped.f_t - exact.f_t)) <= 1e-9

    def test_time_reversal(self, circle_grid):
        state = rotation_oracle(circle_grid, 1.0, 0.0)
        forward = step_rk4_explicit(state, 1e-2)
        back = step_rk4_explicit(reverse(forward), 1e-2)
        assert np.max(np.abs(back.f.points - state.f.points)) <= 1e-9


def test_state_shape_checked(circle):
    with pytest.raises(ValueError, match="velocity shape"):
        GeodesicState(f=circle, f_t=np.zeros((64, 3)))
