"""Tests for the scalar elliptic solves."""

import numpy as np
import pytest

from volimm.errors import MinimalImmersion, MinimalIncompatibleRHS
from volimm.geometry.kernel import build_geometry
from volimm.models.grid import ParamGrid
from volimm.projection.elliptic import (
    SolveMethod,
    elliptic_operator,
    resolve_method,
    solve_constraint_elliptic,
    solve_elliptic_with_stats,
    solve_psi,
)
from volimm.runner.initial import random_smooth_scalar, torus_of_revolution
from volimm.sobolev.operators import apply_Psi


class TestResolveMethod:
    def test_small_curve_goes_dense(self, star_cache):
        assert resolve_method(star_cache, SolveMethod.AUTO) is SolveMethod.DENSE

    def test_surface_goes_cg(self, torus_surface):
        cache = build_geometry(torus_surface)
        assert resolve_method(cache, SolveMethod.AUTO) is SolveMethod.CG

    def test_threshold_from_env(self, star_cache, monkeypatch):
        monkeypatch.setenv("VOLIMM_DENSE_MAX_NODES", "32")
        assert resolve_method(star_cache, SolveMethod.AUTO) is SolveMethod.CG

    def test_explicit_choice_kept(self, star_cache):
        assert resolve_method(star_cache, SolveMethod.CG) is SolveMethod.CG


class TestEllipticSolve:
    def test_circle_mode(self, circle_cache, circle_grid):
        (theta,) = circle_grid.coordinates()
        rhs = np.cos(4 * theta)
        # (d^2 - 1) p = cos 4 theta
        p = solve_constraint_elliptic(circle_cache, rhs)
        assert np.allclose(p, -rhs / 17.0, atol=1e-12)

    @pytest.mark.parametrize("method", [SolveMethod.DENSE, SolveMethod.CG])
    def test_residual(self, star_cache, rng, method):
        rhs = random_smooth_scalar(star_cache.grid, rng, 6) + 0.3
        p, _ = solve_elliptic_with_stats(star_cache, rhs, 1e-12, method)
        assert np.max(np.abs(elliptic_operator(star_cache, p) - rhs)) <= 1e-9

    def test_minimal_incompatible_rhs(self, flat_identity):
        cache = build_geometry(flat_identity)
        with pytest.raises(MinimalIncompatibleRHS):
            solve_constraint_elliptic(cache, np.ones(flat_identity.grid.shape))

    def test_minimal_zero_mean_solution(self, flat_identity):
        cache = build_geometry(flat_identity)
        x, y = flat_identity.grid.coordinates()
        rhs = -2.0 * np.sin(x) * np.cos(y)
        p = solve_constraint_elliptic(cache, rhs)
        assert np.allclose(p, np.sin(x) * np.cos(y), atol=1e-10)


class TestPsiSolve:
    @pytest.mark.parametrize("method", [SolveMethod.DENSE, SolveMethod.CG])
    def test_residual(self, star_cache, rng, method):
        rhs = random_smooth_scalar(star_cache.grid, rng, 4)
        p, _ = solve_psi(star_cache, rhs, 1, 1e-10, method)
        applied = apply_Psi(star_cache, p, 1, 1e-12)
        assert np.max(np.abs(applied - rhs)) <= 1e-7 * np.max(np.abs(rhs))

    def test_minimal_rejected(self, flat_identity):
        cache = build_geometry(flat_identity)
        with pytest.raises(MinimalImmersion):
            solve_psi(cache, np.zeros(flat_identity.grid.shape), 1)

    def test_surface(self, rng):
        f = torus_of_revolution(ParamGrid.torus(12), 2.0, 0.8)
        cache = build_geometry(f)
        rhs = random_smooth_scalar(f.grid, rng, 2)
        dense, _ = solve_psi(cache, rhs, 1, 1e-10, SolveMethod.DENSE)
        cg, _ = solve_psi(cache, rhs, 1, 1e-10, SolveMethod.CG)
        assert np.max(np.abs(dense - cg)) <= 1e-6 * np.max(np.abs(dense))
