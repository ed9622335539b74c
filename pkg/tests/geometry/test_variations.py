"""Tests for the closed-form first variations."""

import numpy as np

from volimm.geometry.kernel import constraint_residual_trace_form
from volimm.geometry.variations import (
    dmetric_variation,
    dvol_variation,
    pullback_metric,
    volume_density,
)


def test_volume_density_of_circle(circle):
    assert np.allclose(volume_density(circle), 1.0, atol=1e-12)


def test_dvol_central_difference(star, star_field):
    eps = 1e-5
    plus = volume_density(star.displaced(star_field, eps))
    minus = volume_density(star.displaced(star_field, -eps))
    fd = (plus - minus) / (2 * eps)
    assert np.max(np.abs(fd - dvol_variation(star, star_field))) <= 1e-7


def test_dmetric_central_difference(star, star_field):
    eps = 1e-5
    plus = pullback_metric(star.displaced(star_field, eps))
    minus = pullback_metric(star.displaced(star_field, -eps))
    fd = (plus - minus) / (2 * eps)
    assert np.max(np.abs(fd - dmetric_variation(star, star_field))) <= 1e-7


def test_dvol_is_trace_form_times_density(star, star_cache, star_field):
    trace = constraint_residual_trace_form(star, star_cache, star_field)
    expected = trace * star_cache.metric.sqrt_det
    assert np.allclose(dvol_variation(star, star_field), expected, atol=1e-12)


def test_dmetric_symmetric(torus_surface, rng):
    h = rng.standard_normal(torus_surface.points.shape)
    dg = dmetric_variation(torus_surface, h)
    assert np.allclose(dg, np.swapaxes(dg, -1, -2))
