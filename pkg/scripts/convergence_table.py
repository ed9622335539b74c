#!/usr/bin/env python3
"""Print time-step convergence tables for the curve integrators.

Usage:
    uv run python scripts/convergence_table.py [T_END]

Integrates the rigidly rotating unit circle with each scheme at a ladder of time
steps and prints the sup-norm error at T_END (default 1.0) with the fitted order.
"""

import sys

from volimm.geodesics.convergence import convergence_study
from volimm.models.scenario import Scheme

LADDERS = {
    Scheme.RK4_EXPLICIT: (0.08, 0.04, 0.02, 0.01),
    Scheme.RATTLE: (0.05, 0.025, 0.0125, 0.00625),
    Scheme.DISCRETE_LAGRANGIAN: (0.05, 0.025, 0.0125, 0.00625),
}


def main() -> None:
    """Run each ladder and print dt, error and the fitted slope."""
    t_end = float(sys.argv[1]) if len(sys.argv) > 1 else 1.0
    for scheme, dts in LADDERS.items():
        l = 1 if scheme is Scheme.DISCRETE_LAGRANGIAN else 0
        study = convergence_study(scheme, dts, t_end, l=l)
        print(f"\n{scheme} (l={l}), t_end={t_end}")
        for dt, err in study.rows():
            print(f"  dt={dt:<10.5g} error={err:.3e}")
        print(f"  fitted order: {study.slope:.3f}")


if __name__ == "__main__":
    main()
