"""Shared test fixtures."""

import numpy as np
import pytest

from volimm.euler.flowmap import identity_flow_map
from volimm.geodesics.curve import unit_circle
from volimm.geometry.immersion import DiscreteImmersion
from volimm.geometry.kernel import GeometryCache, build_geometry
from volimm.models.grid import ParamGrid
from volimm.runner.initial import random_tangent_field, star_curve, torus_of_revolution


@pytest.fixture
def rng():
    """Seeded generator so random fields are the same on every run."""
    return np.random.default_rng(1234)


@pytest.fixture
def circle_grid() -> ParamGrid:
    """64-node grid on S^1."""
    return ParamGrid.circle(64)


@pytest.fixture
def circle(circle_grid) -> DiscreteImmersion:
    """Unit circle at unit speed."""
    return unit_circle(circle_grid)


@pytest.fixture
def circle_cache(circle) -> GeometryCache:
    """Geometry of the unit circle against its own density."""
    return build_geometry(circle)


@pytest.fixture
def star() -> DiscreteImmersion:
    """A non-constant-speed closed curve, so CG paths are exercised."""
    return star_curve(ParamGrid.circle(64), np.random.default_rng(7))


@pytest.fixture
def star_cache(star) -> GeometryCache:
    """Geometry of the star curve."""
    return build_geometry(star)


@pytest.fixture
def star_field(star, rng):
    """Smooth random tangent field along the star curve."""
    return random_tangent_field(star, rng, 4)


@pytest.fixture
def torus_surface() -> DiscreteImmersion:
    """Torus of revolution in R^3 on a small grid."""
    return torus_of_revolution(ParamGrid.torus(16), 2.0, 1.0)


@pytest.fixture
def flat_identity() -> DiscreteImmersion:
    """Identity of the flat torus, the minimal-branch base."""
    return identity_flow_map(ParamGrid.torus(32))
