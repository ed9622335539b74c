"""Command-line entry point: run, check, plotdata and sweep."""

import argparse
import logging
import sys
from pathlib import Path

from volimm.config import get_log_level, get_threads
from volimm.errors import NumericalError, ValidationError
from volimm.models.scenario import Scenario
from volimm.runner.checks import CHECKS, run_checks
from volimm.runner.plotdata import PlotKind, emit_plotdata
from volimm.runner.run import run
from volimm.runner.scenario import load_scenario, parse_scenario, print_scenario
from volimm.runner.sweep import sweep

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="volimm", description="Volume-preserving immersions: runs, sweeps and checks"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_command(name: str, help_text: str) -> argparse.ArgumentParser:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("scenario", type=Path, help="Scenario JSON file")
        cmd.add_argument("--out", type=Path, default=None, help="Output root directory")
        cmd.add_argument("--seed", type=int, default=None, help="Override the scenario seed")
        return cmd

    scenario_command("run", "Run one scenario")
    sweep_cmd = scenario_command("sweep", "Run a scenario's parameter sweep")
    sweep_cmd.add_argument("--threads", type=int, default=None, help="Worker threads")

    check = sub.add_parser("check", help="Run the invariant suite")
    check.add_argument("--threads", type=int, default=None, help="Worker threads")
    check.add_argument(
        "--only", nargs="+", choices=sorted(CHECKS), default=None, help="Subset of checks"
    )

    plot = sub.add_parser("plotdata", help="Write plot-ready tables for a run directory")
    plot.add_argument("run_dir", type=Path, help="Completed run directory")
    plot.add_argument(
        "--kind", choices=[k.value for k in PlotKind], default=None, help="Plot data family"
    )
    return parser


def _scenario(args: argparse.Namespace) -> Scenario:
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario = parse_scenario(print_scenario(scenario.model_copy(update={"seed": args.seed})))
    return scenario


def _dispatch(args: argparse.Namespace) -> int:
    threads = args.threads if getattr(args, "threads", None) else get_threads()
    if args.command == "run":
        record = run(_scenario(args), args.out)
        print(record.model_dump_json(indent=2))
        return EXIT_OK if record.ok else EXIT_NUMERICAL
    if args.command == "sweep":
        records = sweep(_scenario(args), threads, args.out)
        for record in records:
            status = "ok" if record.ok else f"FAILED ({record.failure})"
            print(f"{record.scenario.name}\t{status}")
        return EXIT_OK if all(r.ok for r in records) else EXIT_NUMERICAL
    if args.command == "check":
        results = run_checks(threads, args.only)
        for result in results:
            mark = "PASS" if result.passed else "FAIL"
            print(f"{mark}\t{result.name}\t{result.value:.3e}\t{result.threshold:.1e}")
        failed = sum(not r.passed for r in results)
        print(f"{len(results) - failed}/{len(results)} checks passed")
        return EXIT_OK if failed == 0 else EXIT_NUMERICAL
    kind = PlotKind(args.kind) if args.kind else None
    for path in emit_plotdata(args.run_dir, kind):
        print(path)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    """Parse arguments, configure logging to stderr and run a subcommand."""
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, get_log_level().upper(), logging.WARNING),
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return _dispatch(args)
    except ValidationError as exc:
        logger.error("%s", exc)
        return EXIT_VALIDATION
    except NumericalError as exc:
        logger.error("%s", exc)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
