"""Tests for the L^2 and G^l projections."""

import numpy as np
import pytest

from volimm.errors import MinimalImmersion
from volimm.euler.fields import VelocityField2D, divergence
from volimm.geometry.kernel import build_geometry, constraint_operator
from volimm.projection.dense import dense_project
from volimm.projection.elliptic import SolveMethod
from volimm.projection.projector import (
    decompose,
    hk_project,
    l2_project,
    project,
    projection_defects,
    recover_multiplier,
)
from volimm.runner.initial import random_tangent_field


class TestCircleClosedForms:
    def test_radial_field_is_removed(self, circle, circle_cache):
        result = l2_project(circle, circle_cache, circle.points)
        assert np.allclose(result.h_mu, 0.0, atol=1e-10)
        assert np.allclose(result.p, -1.0, atol=1e-10)

    def test_tangent_field_is_kept(self, circle, circle_cache):
        tangent = circle.jacobian()[..., 0]
        result = l2_project(circle, circle_cache, tangent)
        assert np.allclose(result.h_mu, tangent, atol=1e-10)
        assert np.allclose(result.p, 0.0, atol=1e-10)


class TestL2Projection:
    def test_properties_on_star(self, star, star_cache, star_field):
        result = l2_project(star, star_cache, star_field)
        assert result.within(1e-8)
        defects = projection_defects(star, star_cache, star_field, result)
        assert defects.idempotency <= 1e-10
        assert defects.range_defect == result.residual

    def test_cg_matches_dense(self, star, star_cache, star_field):
        dense = l2_project(star, star_cache, star_field, method=SolveMethod.DENSE)
        cg = l2_project(star, star_cache, star_field, method=SolveMethod.CG)
        assert cg.stats.iterations > 0
        gap = np.max(np.abs(cg.h_mu - dense.h_mu)) / np.max(np.abs(star_field))
        assert gap <= 1e-7

    def test_reference_dense_projection(self, star, star_cache, star_field):
        h_dense, p_dense = dense_project(star_cache, star_field)
        result = l2_project(star, star_cache, star_field)
        assert np.allclose(result.h_mu, h_dense, atol=1e-10)
        assert np.allclose(result.p, p_dense, atol=1e-10)

    def test_surface(self, torus_surface, rng):
        cache = build_geometry(torus_surface)
        X = random_tangent_field(torus_surface, rng, 3)
        result = l2_project(torus_surface, cache, X)
        assert result.within(1e-8)
        assert result.stats.iterations > 0

    def test_minimal_branch_is_leray(self, flat_identity, rng):
        cache = build_geometry(flat_identity)
        X = random_tangent_field(flat_identity, rng, 4)
        result = l2_project(flat_identity, cache, X)
        field = VelocityField2D.from_tangent(flat_identity.grid, result.h_mu)
        assert np.max(np.abs(divergence(field))) <= 1e-9
        # zero-mean gauge
        assert abs(np.mean(result.p)) <= 1e-12

    def test_shape_checked(self, star, star_cache):
        with pytest.raises(ValueError):
            l2_project(star, star_cache, np.zeros((64, 3)))


class TestSobolevProjection:
    @pytest.mark.parametrize("l", [1, 2])
    def test_properties_on_star(self, star, star_cache, star_field, l):
        result = hk_project(star, star_cache, star_field, l)
        assert result.within(1e-8)
        assert result.l == l
        defects = projection_defects(star, star_cache, star_field, result)
        assert defects.idempotency <= 1e-8

    def test_matches_dense(self, star, star_cache, star_field):
        h_dense, _ = dense_project(star_cache, star_field, 2)
        result = hk_project(star, star_cache, star_field, 2)
        assert np.allclose(result.h_mu, h_dense, atol=1e-9)

    def test_cg_matches_dense(self, star, star_cache, star_field):
        dense = hk_project(star, star_cache, star_field, 1, method=SolveMethod.DENSE)
        cg = hk_project(star, star_cache, star_field, 1, method=SolveMethod.CG)
        gap = np.max(np.abs(cg.h_mu - dense.h_mu)) / np.max(np.abs(star_field))
        assert gap <= 1e-6

    def test_needs_positive_order(self, star, star_cache, star_field):
        with pytest.raises(ValueError, match="l >= 1"):
            hk_project(star, star_cache, star_field, 0)

    def test_minimal_immersion_rejected(self, flat_identity):
        cache = build_geometry(flat_identity)
        with pytest.raises(MinimalImmersion):
            hk_project(flat_identity, cache, np.zeros(flat_identity.points.shape), 1)

    def test_project_dispatch(self, star, star_cache, star_field):
        assert project(star, star_cache, star_field).l == 0
        assert project(star, star_cache, star_field, 2).l == 2


class TestDecomposition:
    def test_reassembly(self, star, star_cache, star_field):
        result = decompose(star, star_cache, star_field)
        assert result.reassembly is not None
        assert result.reassembly <= 1e-12
        assert np.max(np.abs(constraint_operator(star_cache, result.h_mu))) <= 1e-8

    def test_multiplier_recovered_l2(self, star, star_cache, star_field):
        result = l2_project(star, star_cache, star_field)
        recovery = recover_multiplier(star, star_cache, star_field, result)
        assert recovery.range_defect <= 1e-9
        assert recovery.p_disagreement <= 1e-9

    def test_multiplier_recovered_h1(self, star, star_cache, star_field):
        result = hk_project(star, star_cache, star_field, 1)
        recovery = recover_multiplier(star, star_cache, star_field, result)
        assert recovery.range_defect <= 1e-7
        assert recovery.p_disagreement <= 1e-7

    def test_arbitrary_complement_is_not_in_range(self, star, star_cache, star_field, rng):
        result = l2_project(star, star_cache, star_field)
        tampered = type(result)(
            h_mu=result.h_mu + 0.1 * random_tangent_field(star, rng, 3),
            p=result.p,
            residual=result.residual,
            orthogonality=result.orthogonality,
            stats=result.stats,
        )
        recovery = recover_multiplier(star, star_cache, star_field, tampered)
        assert recovery.range_defect > 1e-3
