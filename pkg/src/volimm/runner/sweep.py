"""Parameter sweeps: one independent run per value, fanned out over worker threads."""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import pydantic

from volimm.errors import InvalidConfig
from volimm.models.record import RunRecord
from volimm.models.scenario import Scenario
from volimm.runner import output
from volimm.runner.run import run, run_directory
from volimm.runner.scenario import print_scenario

logger = logging.getLogger(__name__)


def expand_sweep(scenario: Scenario) -> list[Scenario]:
    """One scenario per sweep value, named ``<name>_<i>``.

    Raises:
        InvalidConfig: If the scenario has no sweep block.
    """
    if scenario.sweep is None:
        raise InvalidConfig(f"scenario {scenario.name} has no sweep block")
    param = scenario.sweep.param
    variants = []
    for i, value in enumerate(scenario.sweep.values):
        data = scenario.model_dump(mode="json")
        data["name"] = f"{scenario.name}_{i:03d}"
        data["sweep"] = None
        if param == "integrator.dt":
            data["integrator"]["dt"] = value
        elif param == "metric_order":
            data["metric_order"] = int(value)
        else:
            data["grid"] = [int(value)] * len(scenario.grid_sizes)
        try:
            variants.append(Scenario.model_validate(data))
        except pydantic.ValidationError as exc:
            raise InvalidConfig(f"sweep value {value} for {param}: {exc}") from exc
    return variants


def sweep(scenario: Scenario, threads: int = 1, out: Path | None = None) -> list[RunRecord]:
    """Run every sweep value and write ``sweep.tsv`` and a sweep record.

    Each value gets its own run directory inside the sweep directory, so runs share no
    files and the table is identical for any thread count.
    """
    variants = expand_sweep(scenario)
    sweep_dir = run_directory(scenario, out)
    sweep_dir.mkdir(parents=True, exist_ok=True)
    (sweep_dir / output.SCENARIO_FILE).write_text(print_scenario(scenario), encoding="utf-8")
    logger.info("Sweeping %s over %d values with %d threads", scenario.name, len(variants), threads)

    start = time.perf_counter()
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        records = list(pool.map(lambda s: run(s, sweep_dir), variants))

    keys = sorted({key for record in records for key in record.summary})
    values = scenario.sweep.values if scenario.sweep is not None else []
    rows = [
        (value, float(record.ok), *(record.summary.get(k, float("nan")) for k in keys))
        for value, record in zip(values, records, strict=True)
    ]
    output.write_table(
        sweep_dir / output.SWEEP_FILE,
        ("value", "ok", *keys),
        rows,
        comment=f"param={scenario.sweep.param if scenario.sweep else ''}",
    )
    failed = sum(not record.ok for record in records)
    summary_record = RunRecord(
        scenario=scenario,
        wall_time_s=time.perf_counter() - start,
        summary={"runs": float(len(records)), "failed": float(failed)},
        failure=f"{failed} of {len(records)} runs failed" if failed else None,
    )
    (sweep_dir / output.RECORD_FILE).write_text(
        summary_record.model_dump_json(indent=2) + "\n", encoding="utf-8"
    )
    return records
