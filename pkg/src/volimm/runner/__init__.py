"""Scenario files, run directories, sweeps, plot data and the invariant suite."""

from volimm.runner.checks import CHECKS, run_checks
from volimm.runner.plotdata import PlotKind, emit_plotdata, load_record
from volimm.runner.run import run, run_directory
from volimm.runner.scenario import load_scenario, parse_scenario, print_scenario
from volimm.runner.sweep import expand_sweep, sweep

__all__ = [
    "CHECKS",
    "PlotKind",
    "emit_plotdata",
    "expand_sweep",
    "load_record",
    "load_scenario",
    "parse_scenario",
    "print_scenario",
    "run",
    "run_checks",
    "run_directory",
    "sweep",
]
