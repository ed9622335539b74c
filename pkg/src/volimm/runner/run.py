"""Run one scenario and write its directory.

Numerical failures are captured into the run record rather than raised, and whatever
was computed before the failure is still written.
"""

import logging
import time
from pathlib import Path

import numpy as np

from volimm.config import get_output_dir
from volimm.errors import NumericalError
from volimm.euler.evolve import EULER_COLUMNS, EulerTrajectory, integrate_euler
from volimm.geodesics.curve import rotation_oracle
from volimm.geodesics.integrate import integrate
from volimm.geodesics.state import INVARIANT_COLUMNS, GeodesicState, Trajectory
from volimm.geometry.kernel import build_geometry
from volimm.models.grid import ParamGrid
from volimm.models.record import RunRecord
from volimm.models.scenario import InitialFamily, Scenario, ScenarioCase
from volimm.projection.dense import dense_project
from volimm.projection.projector import project, projection_defects, recover_multiplier
from volimm.runner import output
from volimm.runner.initial import (
    curve_state,
    euler_state,
    periodic_bump,
    random_tangent_field,
    star_curve,
    torus_normal_bump,
)
from volimm.runner.scenario import print_scenario

logger = logging.getLogger(__name__)

PROJECTION_STUDY_COLUMNS = (
    "N",
    "l",
    "idempotency",
    "orthogonality",
    "range",
    "recovery",
    "dense_agreement",
)


def run_directory(scenario: Scenario, out: Path | None = None) -> Path:
    """``<out>/<name>``, with out falling back to the scenario, then VOLIMM_OUTPUT_DIR."""
    if out is None:
        out = Path(scenario.output_dir) if scenario.output_dir else get_output_dir()
    return out / scenario.name


def _state_columns(state: GeodesicState) -> list[str]:
    names = ["x", "y", "z"][: state.f.target_dim]
    return names + [f"v{name}" for name in names]


def _write_geodesic(run_dir: Path, trajectory: Trajectory) -> None:
    output.write_table(
        run_dir / output.INVARIANTS_FILE,
        INVARIANT_COLUMNS,
        [record.row() for record in trajectory.invariant_log],
    )
    snap_dir = run_dir / output.SNAPSHOT_DIR
    snap_dir.mkdir(exist_ok=True)
    entries = []
    for i, state in enumerate(trajectory.snapshots):
        n = state.f.target_dim
        rows = np.concatenate([state.f.points.reshape(-1, n), state.f_t.reshape(-1, n)], axis=1)
        name = output.snapshot_name(i)
        comment = f"t={float(state.t)!r}"
        output.write_table(snap_dir / name, _state_columns(state), rows, comment=comment)
        entries.append((i, state.t, name))
    output.write_index(snap_dir / output.INDEX_FILE, entries)


def _run_geodesic(scenario: Scenario, run_dir: Path) -> tuple[dict[str, float], str | None]:
    grid_sizes = scenario.grid_sizes
    ic = scenario.initial_condition
    if scenario.case is ScenarioCase.SURFACE_L2:
        initial = torus_normal_bump(ParamGrid.torus(*grid_sizes), ic)
    else:
        initial = curve_state(ParamGrid.circle(grid_sizes[0]), ic)

    trajectory = integrate(initial, scenario.integrator_config, l=scenario.metric_order)
    _write_geodesic(run_dir, trajectory)
    summary = {
        "final_t": trajectory.final.t,
        "steps": float(trajectory.invariant_log[-1].step),
        "energy_drift": trajectory.energy_drift(),
        "max_rho_drift": trajectory.max_rho_drift(),
        "max_residual": trajectory.max_residual(),
    }
    if ic.family is InitialFamily.ROTATION:
        final = trajectory.final
        exact = rotation_oracle(final.f.grid, ic.omega, final.t)
        summary["oracle_error"] = float(np.max(np.abs(final.f.points - exact.f.points)))
    return summary, trajectory.failure


def _write_euler(run_dir: Path, trajectory: EulerTrajectory) -> None:
    output.write_table(
        run_dir / output.INVARIANTS_FILE, EULER_COLUMNS, [r.row() for r in trajectory.log]
    )
    snap_dir = run_dir / output.SNAPSHOT_DIR
    snap_dir.mkdir(exist_ok=True)
    entries = []
    for i, snap in enumerate(trajectory.snapshots):
        name = output.snapshot_name(i)
        output.write_matrix(snap_dir / name, snap.vorticity.omega, f"omega t={float(snap.t)!r}")
        if snap.flow_map is not None:
            output.write_table(
                snap_dir / f"flow_{i:05d}.tsv",
                ("x", "y"),
                snap.flow_map.wrapped().reshape(-1, 2),
                comment=f"t={float(snap.t)!r}",
            )
        entries.append((i, snap.t, name))
    output.write_index(snap_dir / output.INDEX_FILE, entries)


def _run_euler(scenario: Scenario, run_dir: Path) -> tuple[dict[str, float], str | None]:
    grid = ParamGrid.torus(*scenario.grid_sizes)
    cfg = scenario.integrator_config
    omega0 = euler_state(grid, scenario.initial_condition, scenario.seed)
    trajectory = integrate_euler(omega0, cfg.dt, cfg.n_steps, cfg.stride)
    _write_euler(run_dir, trajectory)
    last = trajectory.log[-1]
    summary = {
        "final_t": last.t,
        "steps": float(last.step),
        "omega_change": last.omega_change,
        "energy_drift": trajectory.relative_drift("energy"),
        "enstrophy_drift": trajectory.relative_drift("enstrophy"),
        "max_rho_drift": max(r.rho_drift for r in trajectory.log),
        "mean_omega_drift": max(abs(r.mean_omega - omega0.mean) for r in trajectory.log),
    }
    return summary, trajectory.failure


def projection_study_rows(scenario: Scenario) -> list[tuple[float, ...]]:
    """Projection defects for every study size and metric order."""
    orders = sorted({0, 1, 2, scenario.metric_order})
    ic = scenario.initial_condition
    rows = []
    for size in scenario.study_sizes:
        rng = np.random.default_rng(scenario.seed)
        grid = ParamGrid.circle(size)
        f = star_curve(grid, rng)
        if ic.family is InitialFamily.RANDOM_FIELD:
            X = ic.amplitude * random_tangent_field(f, rng, ic.modes)
        else:
            (theta,) = grid.coordinates()
            X = ic.amplitude * periodic_bump(theta, ic.center, ic.width)[..., None] * f.points
        cache = build_geometry(f)
        scale = max(float(np.max(np.abs(X))), 1e-300)
        for l in orders:
            result = project(f, cache, X, l)
            defects = projection_defects(f, cache, X, result)
            recovery = recover_multiplier(f, cache, X, result)
            h_dense, _ = dense_project(cache, X, l)
            agreement = float(np.max(np.abs(h_dense - result.h_mu))) / scale
            logger.info(
                "projection study N=%d l=%d: idempotency %.3e orthogonality %.3e",
                size,
                l,
                defects.idempotency,
                defects.orthogonality,
            )
            rows.append(
                (
                    float(size),
                    float(l),
                    defects.idempotency,
                    defects.orthogonality,
                    defects.range_defect,
                    recovery.range_defect,
                    agreement,
                )
            )
    return rows


def _run_projection_study(
    scenario: Scenario, run_dir: Path
) -> tuple[dict[str, float], str | None]:
    rows = projection_study_rows(scenario)
    output.write_table(run_dir / output.PROJECTION_STUDY_FILE, PROJECTION_STUDY_COLUMNS, rows)
    table = np.asarray(rows)
    summary = {
        f"max_{name}": float(np.max(table[:, j]))
        for j, name in enumerate(PROJECTION_STUDY_COLUMNS)
        if j >= 2
    }
    return summary, None


_CASES = {
    ScenarioCase.WHIP_CURVE: _run_geodesic,
    ScenarioCase.SURFACE_L2: _run_geodesic,
    ScenarioCase.EULER_TORUS: _run_euler,
    ScenarioCase.PROJECTION_STUDY: _run_projection_study,
}


def run(scenario: Scenario, out: Path | None = None) -> RunRecord:
    """Execute a scenario, write its run directory and return the record."""
    run_dir = run_directory(scenario, out)
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / output.SCENARIO_FILE).write_text(print_scenario(scenario), encoding="utf-8")
    logger.info("Running scenario %s (%s) into %s", scenario.name, scenario.case, run_dir)

    start = time.perf_counter()
    summary: dict[str, float] = {}
    failure: str | None = None
    try:
        summary, failure = _CASES[scenario.case](scenario, run_dir)
    except NumericalError as exc:
        logger.warning("Scenario %s failed: %s", scenario.name, exc)
        failure = f"{type(exc).__name__}: {exc}"

    record = RunRecord(
        scenario=scenario,
        wall_time_s=time.perf_counter() - start,
        summary=summary,
        failure=failure,
    )
    (run_dir / output.RECORD_FILE).write_text(
        record.model_dump_json(indent=2) + "\n", encoding="utf-8"
    )
    return record
