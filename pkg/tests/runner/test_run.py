"""Tests for scenario runs, plot data and sweeps."""

import importlib
from pathlib import Path

import numpy as np
import pytest

from volimm.errors import InvalidConfig, MissingRun, RankDeficient
from volimm.models.record import RunRecord
from volimm.models.scenario import Scenario, ScenarioCase
from volimm.runner import output
from volimm.runner.plotdata import PlotKind, emit_plotdata, load_record
from volimm.runner.run import run, run_directory
from volimm.runner.scenario import load_scenario
from volimm.runner.sweep import expand_sweep, sweep

run_module = importlib.import_module("volimm.runner.run")


def _rotation(**overrides) -> Scenario:
    data = {
        "name": "spin",
        "case": "whip_curve",
        "grid": [32],
        "initial": {"family": "rotation"},
        "integrator": {"scheme": "rk4_explicit", "dt": 0.01, "t_end": 0.05, "stride": 2},
        **overrides,
    }
    return Scenario.model_validate(data)


def _shear() -> Scenario:
    return Scenario.model_validate(
        {
            "name": "shear",
            "case": "euler_torus",
            "grid": [32, 32],
            "integrator": {"dt": 1e-3, "t_end": 0.005, "stride": 5},
        }
    )


@pytest.fixture
def rotation_run(tmp_path) -> Path:
    """Completed rotation run directory."""
    run(_rotation(), tmp_path)
    return tmp_path / "spin"


class TestRunDirectory:
    def test_explicit_root(self, tmp_path):
        assert run_directory(_rotation(), tmp_path) == tmp_path / "spin"

    def test_scenario_output_dir(self, tmp_path):
        scenario = _rotation(output_dir=str(tmp_path / "mine"))
        assert run_directory(scenario) == tmp_path / "mine" / "spin"

    def test_env_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("VOLIMM_OUTPUT_DIR", str(tmp_path))
        assert run_directory(_rotation()) == tmp_path / "spin"


class TestGeodesicRun:
    def test_record_and_files(self, rotation_run):
        record = load_record(rotation_run)
        assert record.ok
        assert record.summary["steps"] == 5.0
        assert np.isclose(record.summary["final_t"], 0.05)
        assert record.summary["oracle_error"] < 1e-8
        assert (rotation_run / output.SCENARIO_FILE).is_file()
        assert (rotation_run / output.INVARIANTS_FILE).is_file()

    def test_snapshots(self, rotation_run):
        snap_dir = rotation_run / output.SNAPSHOT_DIR
        index = output.read_index(snap_dir / output.INDEX_FILE)
        assert [name for _, _, name in index] == [output.snapshot_name(i) for i in range(4)]
        columns, data = output.read_table(snap_dir / index[-1][2])
        assert columns == ["x", "y", "vx", "vy"]
        assert data.shape == (32, 4)

    def test_invariant_log(self, rotation_run):
        columns, data = output.read_table(rotation_run / output.INVARIANTS_FILE)
        assert columns[:2] == ["step", "t"]
        assert data.shape[0] == 6

    def test_numerical_error_is_recorded(self, tmp_path, monkeypatch):
        def broken(scenario, run_dir):
            raise RankDeficient((3,), 0.0, 1e-10)

        monkeypatch.setitem(run_module._CASES, ScenarioCase.WHIP_CURVE, broken)
        record = run(_rotation(), tmp_path)
        assert not record.ok
        assert record.failure is not None
        assert record.failure.startswith("RankDeficient:")
        assert not load_record(tmp_path / "spin").ok

    @pytest.mark.slow
    def test_surface_run(self, tmp_path):
        scenario = Scenario.model_validate(
            {
                "name": "torus",
                "case": "surface_l2",
                "grid": [16, 16],
                "integrator": {"scheme": "rattle", "dt": 0.01, "t_end": 0.1, "stride": 5},
            }
        )
        record = run(scenario, tmp_path)
        assert record.ok
        assert record.summary["max_rho_drift"] <= 1e-8


class TestEulerRun:
    def test_record_and_flow_maps(self, tmp_path):
        record = run(_shear(), tmp_path)
        assert record.ok
        assert record.summary["omega_change"] <= 1e-12
        snap_dir = tmp_path / "shear" / output.SNAPSHOT_DIR
        assert (snap_dir / "flow_00001.tsv").is_file()
        omega = np.loadtxt(snap_dir / output.snapshot_name(1), delimiter="\t")
        assert omega.shape == (32, 32)


def test_projection_study(tmp_path):
    scenario = Scenario.model_validate(
        {"name": "study", "case": "projection_study", "study_sizes": [16, 32], "metric_order": 1}
    )
    record = run(scenario, tmp_path)
    columns, data = output.read_table(tmp_path / "study" / output.PROJECTION_STUDY_FILE)
    assert columns == list(run_module.PROJECTION_STUDY_COLUMNS)
    assert data.shape == (6, 7)
    assert data[:, 1].tolist() == [0.0, 1.0, 2.0, 0.0, 1.0, 2.0]
    assert record.summary["max_idempotency"] <= 1e-6
    assert record.summary["max_dense_agreement"] <= 1e-6


class TestPlotdata:
    def test_geodesic_defaults(self, rotation_run):
        written = emit_plotdata(rotation_run)
        names = sorted(p.name for p in written)
        assert len(written) == 10
        assert "curve_00003.tsv" in names
        assert "energy.tsv" in names
        columns, data = output.read_table(rotation_run / output.PLOT_DIR / "curve_00000.tsv")
        assert columns == ["x", "y"]
        assert data.shape == (33, 2)
        assert np.array_equal(data[0], data[-1])

    def test_euler_fields(self, tmp_path):
        run(_shear(), tmp_path)
        written = emit_plotdata(tmp_path / "shear", PlotKind.FIELDS)
        assert [p.name for p in written] == ["vorticity_00000.tsv", "vorticity_00001.tsv"]

    def test_fields_need_euler(self, rotation_run):
        with pytest.raises(InvalidConfig, match="euler"):
            emit_plotdata(rotation_run, PlotKind.FIELDS)

    def test_curves_need_geodesic(self, tmp_path):
        run(_shear(), tmp_path)
        with pytest.raises(InvalidConfig):
            emit_plotdata(tmp_path / "shear", PlotKind.CURVES)

    def test_convergence_needs_dt_sweep(self, rotation_run):
        with pytest.raises(InvalidConfig, match="integrator.dt"):
            emit_plotdata(rotation_run, PlotKind.CONVERGENCE)

    def test_missing_run(self, tmp_path):
        with pytest.raises(MissingRun):
            emit_plotdata(tmp_path)


class TestSweep:
    def test_expand(self):
        scenario = _rotation(sweep={"param": "grid", "values": [16, 32]})
        variants = expand_sweep(scenario)
        assert [v.name for v in variants] == ["spin_000", "spin_001"]
        assert [v.grid_sizes for v in variants] == [[16], [32]]
        assert all(v.sweep is None for v in variants)

    def test_expand_metric_order(self):
        scenario = _rotation(sweep={"param": "metric_order", "values": [1, 2]})
        assert [v.metric_order for v in expand_sweep(scenario)] == [1, 2]

    def test_needs_sweep_block(self):
        with pytest.raises(InvalidConfig, match="no sweep"):
            expand_sweep(_rotation())

    def test_invalid_value(self):
        with pytest.raises(InvalidConfig, match="sweep value"):
            expand_sweep(_rotation(sweep={"param": "grid", "values": [7]}))

    def test_dt_sweep_convergence(self, tmp_path):
        scenario = _rotation(
            integrator={"dt": 0.04, "t_end": 0.4, "stride": 100},
            sweep={"param": "integrator.dt", "values": [0.04, 0.02]},
        )
        records = sweep(scenario, 1, tmp_path)
        assert all(r.ok for r in records)
        sweep_dir = tmp_path / "spin"
        assert (sweep_dir / "spin_001" / output.RECORD_FILE).is_file()
        assert RunRecord.model_validate_json(
            (sweep_dir / output.RECORD_FILE).read_text(encoding="utf-8")
        ).summary == {"runs": 2.0, "failed": 0.0}

        (path,) = emit_plotdata(sweep_dir)
        header = path.read_text(encoding="utf-8").splitlines()[0]
        slope = float(header.removeprefix("# slope="))
        assert 3.0 <= slope <= 5.0

    def test_thread_count_does_not_change_table(self, tmp_path):
        scenario = _rotation(sweep={"param": "integrator.dt", "values": [0.01, 0.005]})
        sweep(scenario, 1, tmp_path / "one")
        sweep(scenario, 2, tmp_path / "two")
        _, one = output.read_table(tmp_path / "one" / "spin" / output.SWEEP_FILE)
        _, two = output.read_table(tmp_path / "two" / "spin" / output.SWEEP_FILE)
        assert np.array_equal(one, two)


SCENARIO_DIR = Path(__file__).resolve().parents[2] / "scenarios"


@pytest.mark.slow
@pytest.mark.parametrize("name", ["whip", "whip_h1", "torus"])
def test_shipped_scenario_reaches_t_end(tmp_path, name):
    scenario = load_scenario(SCENARIO_DIR / f"{name}.json")
    record = run(scenario, tmp_path)
    assert record.ok, record.failure
    assert np.isclose(record.summary["final_t"], scenario.integrator_config.t_end)


@pytest.mark.slow
def test_shipped_rotation_sweep_completes(tmp_path):
    records = sweep(load_scenario(SCENARIO_DIR / "rotation_dt.json"), 1, tmp_path)
    assert [r.ok for r in records] == [True, True, True]
