"""Tests for parameter grids."""

import math

import numpy as np
import pydantic
import pytest

from volimm.models.grid import ParamGrid


class TestParamGrid:
    def test_circle_defaults(self):
        grid = ParamGrid.circle(16)
        assert grid.shape == (16,)
        assert grid.periods == (2 * math.pi,)
        assert grid.spacing == (2 * math.pi / 16,)
        assert grid.node_count == 16

    def test_torus(self):
        grid = ParamGrid.torus(8, 12)
        assert grid.shape == (8, 12)
        assert grid.node_count == 96
        assert math.isclose(grid.cell_volume, (2 * math.pi) ** 2 / 96)

    def test_periods_filled_from_dim(self):
        grid = ParamGrid(dim=2, sizes=(8, 8))
        assert grid.periods == (2 * math.pi, 2 * math.pi)

    def test_coordinates(self):
        x, y = ParamGrid.torus(8).coordinates()
        assert x.shape == (8, 8)
        assert np.all(x[:, 0] == y[0, :])
        assert x[1, 0] == pytest.approx(math.pi / 4)

    @pytest.mark.parametrize("size", [6, 9, 0])
    def test_rejects_bad_sizes(self, size):
        with pytest.raises(pydantic.ValidationError, match="even"):
            ParamGrid.circle(size)

    def test_rejects_dimension_mismatch(self):
        with pytest.raises(pydantic.ValidationError, match="length"):
            ParamGrid(dim=1, sizes=(8, 8))

    def test_rejects_non_positive_period(self):
        with pytest.raises(pydantic.ValidationError, match="positive"):
            ParamGrid.circle(8, period=-1.0)

    def test_frozen(self):
        grid = ParamGrid.circle(8)
        with pytest.raises(pydantic.ValidationError):
            grid.dim = 2
