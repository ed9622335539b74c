"""Tests for the pseudo-spectral vorticity solver and the Euler driver."""

import numpy as np
import pytest

from volimm.errors import CFLViolation
from volimm.euler.evolve import EULER_COLUMNS, integrate_euler
from volimm.euler.fields import VorticityField, velocity_from_vorticity
from volimm.euler.vorticity import cfl_bound, step_euler_vorticity
from volimm.models.grid import ParamGrid
from volimm.models.scenario import InitialCondition, InitialFamily
from volimm.runner.initial import random_vorticity, shear_flow


@pytest.fixture
def shear() -> VorticityField:
    """Steady shear u = sin y on 32^2."""
    return shear_flow(ParamGrid.torus(32), InitialCondition(family=InitialFamily.SHEAR_FLOW))


@pytest.fixture
def turbulent() -> VorticityField:
    """Seeded random vorticity on 32^2."""
    ic = InitialCondition(family=InitialFamily.RANDOM_FIELD, amplitude=1.0)
    return random_vorticity(ParamGrid.torus(32), ic, seed=5)


class TestStep:
    def test_cfl_at_rest(self):
        grid = ParamGrid.torus(32)
        rest = VorticityField.initial(grid, np.zeros(grid.shape))
        assert cfl_bound(velocity_from_vorticity(rest)) == float("inf")

    def test_coarse_grid_rejected(self):
        grid = ParamGrid.torus(16)
        with pytest.raises(ValueError, match="32"):
            step_euler_vorticity(VorticityField.initial(grid, np.zeros(grid.shape)), 1e-3)

    def test_cfl_violation(self, shear):
        bound = cfl_bound(velocity_from_vorticity(shear))
        with pytest.raises(CFLViolation) as excinfo:
            step_euler_vorticity(shear, 2.0 * bound)
        assert excinfo.value.bound == pytest.approx(bound)

    def test_shear_is_steady(self, shear):
        stepped = step_euler_vorticity(shear, 1e-2)
        assert np.max(np.abs(stepped.omega - shear.omega)) <= 1e-13

    def test_mean_held(self, turbulent):
        field = VorticityField.initial(turbulent.grid, turbulent.omega + 0.3)
        stepped = step_euler_vorticity(field, 1e-2)
        assert np.isclose(np.mean(stepped.omega), field.mean, atol=1e-14)

    def test_flow_moves(self, turbulent):
        stepped = step_euler_vorticity(turbulent, 1e-2)
        assert np.max(np.abs(stepped.omega - turbulent.omega)) > 1e-6


class TestIntegrateEuler:
    def test_snapshots_and_log(self, shear):
        trajectory = integrate_euler(shear, 1e-2, 10, 5)
        assert trajectory.ok
        assert len(trajectory.snapshots) == 3
        assert len(trajectory.log) == 11
        assert len(trajectory.log[0].row()) == len(EULER_COLUMNS)
        assert trajectory.snapshots[-1].flow_map is not None

    def test_shear_flow_map_is_volume_preserving(self, shear):
        trajectory = integrate_euler(shear, 1e-2, 10, 10)
        assert max(r.rho_drift for r in trajectory.log) <= 1e-12
        assert max(r.omega_change for r in trajectory.log) <= 1e-12

    def test_energy_and_enstrophy_conserved(self, turbulent):
        trajectory = integrate_euler(turbulent, 1e-2, 100, 50, track_flow_map=False)
        assert trajectory.relative_drift("energy") <= 1e-6
        assert trajectory.relative_drift("enstrophy") <= 1e-6
        assert all(r.rho_drift == 0.0 for r in trajectory.log)

    def test_flow_map_density_stays_near_one(self, turbulent):
        trajectory = integrate_euler(turbulent, 1e-2, 10, 10)
        assert max(r.rho_drift for r in trajectory.log) <= 1e-6

    def test_cfl_failure_is_recorded(self, shear):
        trajectory = integrate_euler(shear, 1.0, 3, 1)
        assert not trajectory.ok
        assert trajectory.failure is not None
        assert trajectory.failure.startswith("step 1:")
        assert len(trajectory.log) == 1
        assert len(trajectory.snapshots) == 1
