"""Text output: tab-separated numeric tables at full double precision."""

from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np

from volimm.geometry.immersion import FloatArray

SNAPSHOT_DIR = "snapshots"
INDEX_FILE = "index.tsv"
INVARIANTS_FILE = "invariants.tsv"
RECORD_FILE = "record.json"
SCENARIO_FILE = "scenario.json"
PROJECTION_STUDY_FILE = "projection_study.tsv"
SWEEP_FILE = "sweep.tsv"
PLOT_DIR = "plot"


def write_table(
    path: Path,
    columns: Sequence[str],
    rows: Iterable[Sequence[float]] | FloatArray,
    comment: str | None = None,
) -> Path:
    """Write a header line and one tab-separated row per entry (``%.17g``)."""
    data = np.asarray(list(rows) if not isinstance(rows, np.ndarray) else rows, dtype=np.float64)
    data = data.reshape(-1, len(columns)) if data.size else np.empty((0, len(columns)))
    header = "\t".join(columns)
    if comment:
        header = f"{comment}\n{header}"
    np.savetxt(path, data, fmt="%.17g", delimiter="\t", header=header, comments="# ")
    return path


def write_matrix(path: Path, matrix: FloatArray, comment: str) -> Path:
    """Write a two-dimensional grid field as a plain matrix."""
    np.savetxt(path, matrix, fmt="%.17g", delimiter="\t", header=comment, comments="# ")
    return path


def read_table(path: Path) -> tuple[list[str], FloatArray]:
    """Read a file written by :func:`write_table`: column names and a 2-D array."""
    columns: list[str] = []
    with path.open(encoding="utf-8") as handle:
        for line in handle:
            if not line.startswith("#"):
                break
            columns = line[1:].strip().split("\t")
    data = np.loadtxt(path, delimiter="\t", comments="#", ndmin=2)
    return columns, np.asarray(data, dtype=np.float64)


def snapshot_name(index: int) -> str:
    """File name of snapshot ``index``."""
    return f"snap_{index:05d}.tsv"


def write_index(path: Path, entries: Sequence[tuple[int, float, str]]) -> Path:
    """Snapshot index: number, time (shortest round-trip repr) and file name."""
    lines = ["# i\tt\tfile"]
    lines += [f"{i}\t{float(t)!r}\t{name}" for i, t, name in entries]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_index(path: Path) -> list[tuple[int, float, str]]:
    """Inverse of :func:`write_index`."""
    entries = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line or line.startswith("#"):
            continue
        i, t, name = line.split("\t")
        entries.append((int(i), float(t), name))
    return entries
