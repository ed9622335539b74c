"""Plot-ready data from a completed run directory."""

import logging
from enum import StrEnum
from pathlib import Path

import numpy as np

from volimm.errors import InvalidConfig, MissingRun
from volimm.geodesics.convergence import fit_slope
from volimm.models.record import RunRecord
from volimm.models.scenario import ScenarioCase
from volimm.runner import output

logger = logging.getLogger(__name__)


class PlotKind(StrEnum):
    """Families of plot data."""

    CURVES = "curves"
    FIELDS = "fields"
    INVARIANTS = "invariants"
    CONVERGENCE = "convergence"


_DEFAULT_KINDS: dict[ScenarioCase, tuple[PlotKind, ...]] = {
    ScenarioCase.WHIP_CURVE: (PlotKind.CURVES, PlotKind.INVARIANTS),
    ScenarioCase.SURFACE_L2: (PlotKind.CURVES, PlotKind.INVARIANTS),
    ScenarioCase.EULER_TORUS: (PlotKind.FIELDS, PlotKind.INVARIANTS),
    ScenarioCase.PROJECTION_STUDY: (),
}


def load_record(run_dir: Path) -> RunRecord:
    """Read record.json of a run directory.

    Raises:
        MissingRun: If the directory holds no run record.
    """
    path = run_dir / output.RECORD_FILE
    if not path.is_file():
        raise MissingRun(f"{run_dir} holds no {output.RECORD_FILE}")
    return RunRecord.model_validate_json(path.read_text(encoding="utf-8"))


def _snapshots(run_dir: Path) -> list[tuple[int, float, str]]:
    index = run_dir / output.SNAPSHOT_DIR / output.INDEX_FILE
    if not index.is_file():
        raise MissingRun(f"{run_dir} has no snapshot index")
    return output.read_index(index)


def _curves(run_dir: Path, plot_dir: Path) -> list[Path]:
    written = []
    for i, t, name in _snapshots(run_dir):
        columns, data = output.read_table(run_dir / output.SNAPSHOT_DIR / name)
        positions = [c for c in columns if c in ("x", "y", "z")]
        rows = data[:, : len(positions)]
        if len(positions) == 2:
            rows = np.vstack([rows, rows[:1]])  # close the curve
        path = plot_dir / f"curve_{i:05d}.tsv"
        written.append(output.write_table(path, positions, rows, comment=f"t={t!r}"))
    return written


def _fields(run_dir: Path, plot_dir: Path) -> list[Path]:
    written = []
    for i, t, name in _snapshots(run_dir):
        matrix = np.loadtxt(run_dir / output.SNAPSHOT_DIR / name, delimiter="\t", ndmin=2)
        path = plot_dir / f"vorticity_{i:05d}.tsv"
        written.append(output.write_matrix(path, matrix, f"omega t={t!r}"))
    return written


def _invariants(run_dir: Path, plot_dir: Path) -> list[Path]:
    path = run_dir / output.INVARIANTS_FILE
    if not path.is_file():
        raise MissingRun(f"{run_dir} has no invariant log")
    columns, data = output.read_table(path)
    t = data[:, columns.index("t")]
    written = []
    for j, column in enumerate(columns):
        if column in ("step", "t"):
            continue
        target = plot_dir / f"{column}.tsv"
        written.append(output.write_table(target, ("t", column), np.column_stack([t, data[:, j]])))
    return written


def _convergence(run_dir: Path, plot_dir: Path) -> list[Path]:
    path = run_dir / output.SWEEP_FILE
    if not path.is_file():
        raise MissingRun(f"{run_dir} has no {output.SWEEP_FILE}; run a dt sweep first")
    columns, data = output.read_table(path)
    if "oracle_error" not in columns:
        raise InvalidConfig("convergence data needs a sweep of a rotation scenario")
    ok = data[:, columns.index("ok")] > 0
    dts = tuple(float(x) for x in data[ok, columns.index("value")])
    errors = tuple(float(x) for x in data[ok, columns.index("oracle_error")])
    slope = fit_slope(dts, errors)
    target = plot_dir / "convergence.tsv"
    return [
        output.write_table(
            target, ("dt", "error"), np.column_stack([dts, errors]), comment=f"slope={slope:.6f}"
        )
    ]


_EMITTERS = {
    PlotKind.CURVES: _curves,
    PlotKind.FIELDS: _fields,
    PlotKind.INVARIANTS: _invariants,
    PlotKind.CONVERGENCE: _convergence,
}


def emit_plotdata(run_dir: Path, kind: PlotKind | None = None) -> list[Path]:
    """Write plot data under ``<run_dir>/plot``; all kinds that fit the run when kind is None.

    Raises:
        MissingRun: The directory is not a completed run (or lacks what ``kind`` needs).
        InvalidConfig: ``kind`` does not apply to this run's case.
    """
    record = load_record(run_dir)
    case = record.scenario.case
    if kind is PlotKind.FIELDS and case is not ScenarioCase.EULER_TORUS:
        raise InvalidConfig("field plot data needs an euler_torus run")
    if kind is PlotKind.CURVES and case is ScenarioCase.EULER_TORUS:
        raise InvalidConfig("curve plot data needs a geodesic run")
    is_sweep = (run_dir / output.SWEEP_FILE).is_file()
    sweep = record.scenario.sweep
    dt_sweep = is_sweep and sweep is not None and sweep.param == "integrator.dt"
    if kind is PlotKind.CONVERGENCE and not dt_sweep:
        raise InvalidConfig("convergence data needs a sweep over integrator.dt")
    if kind is not None:
        kinds: tuple[PlotKind, ...] = (kind,)
    elif is_sweep:
        kinds = (PlotKind.CONVERGENCE,) if dt_sweep else ()
    else:
        kinds = _DEFAULT_KINDS[case]

    plot_dir = run_dir / output.PLOT_DIR
    plot_dir.mkdir(exist_ok=True)
    written: list[Path] = []
    for k in kinds:
        files = _EMITTERS[k](run_dir, plot_dir)
        logger.info("Wrote %d %s plot files to %s", len(files), k, plot_dir)
        written.extend(files)
    return written
