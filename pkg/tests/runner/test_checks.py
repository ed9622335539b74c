"""Tests for the invariant suite."""

import importlib
import math

import pytest

from volimm.errors import ConstraintSolveFailed, NoConvergence
from volimm.geodesics.curve import rotation_oracle
from volimm.models.grid import ParamGrid
from volimm.models.scenario import IntegratorConfig, Scheme
from volimm.runner import checks
from volimm.runner.checks import CHECKS, run_checks
from volimm.sobolev.krylov import OperatorStats

integrate_module = importlib.import_module("volimm.geodesics.integrate")


def test_circle_projection_passes():
    (result,) = run_checks(names=["circle_projection"])
    assert result.passed
    assert result.value <= result.threshold


def test_psi_passes():
    results = run_checks(names=["psi"])
    assert len(results) == 10
    assert all(r.passed for r in results), [r for r in results if not r.passed]


def test_results_keep_suite_order():
    results = run_checks(threads=2, names=["psi", "circle_projection"])
    assert results[0].name == "psi_self_adjoint_l0"
    assert results[-1].name == "circle_projection_closed_forms"


def test_library_error_becomes_failed_result(monkeypatch):
    def diverging():
        raise NoConvergence(OperatorStats(iterations=99, residual=0.5), "cg")

    monkeypatch.setitem(CHECKS, "circle_projection", diverging)
    (result,) = run_checks(names=["circle_projection"])
    assert not result.passed
    assert math.isnan(result.value)
    assert result.detail is not None
    assert "did not converge" in result.detail


def test_value_error_becomes_failed_result(monkeypatch):
    def overflowing():
        raise ValueError("immersion has non-finite entries")

    monkeypatch.setitem(CHECKS, "circle_projection", overflowing)
    (result,) = run_checks(names=["circle_projection"])
    assert not result.passed
    assert result.detail == "ValueError: immersion has non-finite entries"


def test_variations_span_four_decades(monkeypatch):
    seen = []
    fit = checks.fit_slope

    def recording_fit(steps, errors):
        seen.append(steps)
        return fit(steps, errors)

    monkeypatch.setattr(checks, "fit_slope", recording_fit)
    results = run_checks(names=["variations"])
    assert all(r.passed for r in results), results
    assert seen == [(1e-3, 1e-4, 1e-5, 1e-6)] * 2


def test_unknown_check_raises():
    with pytest.raises(KeyError):
        run_checks(names=["no_such_check"])


@pytest.mark.slow
@pytest.mark.parametrize("name", sorted(checks.CHECKS))
def test_full_suite(name):
    results = run_checks(names=[name])
    assert all(r.passed for r in results), [r for r in results if not r.passed]


@pytest.fixture
def two_step_runs(monkeypatch):
    """Every integration in the suite stops after two steps and rattle always fails."""
    integrate = checks.integrate

    def short(initial, cfg, **kwargs):
        return integrate(initial, cfg.model_copy(update={"t_end": 2 * cfg.dt}), **kwargs)

    def failing(state, dt, *, l, mu, cfg):
        raise ConstraintSolveFailed(3, 1e-3)

    monkeypatch.setattr(checks, "integrate", short)
    monkeypatch.setitem(integrate_module.STEPPERS, Scheme.RATTLE, failing)


class TestIncompleteRuns:
    def test_constraint_preservation_fails(self, two_step_runs):
        rattle, rk4 = checks.check_constraint_preservation()
        assert not rattle.passed
        assert rattle.detail is not None
        assert "step 1: constraint solve failed" in rattle.detail
        assert not rk4.passed
        assert rk4.detail is not None
        assert "before t_end" in rk4.detail

    def test_cross_integrator_fails(self, two_step_runs):
        (result,) = checks.check_cross_integrator()
        assert not result.passed
        assert result.detail is not None
        assert result.detail.startswith("incomplete run")

    def test_complete_run_is_judged_on_value(self):
        cfg = IntegratorConfig(scheme=Scheme.RATTLE, dt=0.01, t_end=0.05, stride=5)
        initial = rotation_oracle(ParamGrid.circle(32), 1.0, 0.0)
        trajectory = integrate_module.integrate(initial, cfg)
        assert trajectory.ok
        assert checks._over_runs("drift", 0.5, 1.0, 0.05, trajectory).passed
        assert not checks._over_runs("drift", 2.0, 1.0, 0.05, trajectory).passed
        assert not checks._over_runs("drift", 0.5, 1.0, 0.1, trajectory).passed
