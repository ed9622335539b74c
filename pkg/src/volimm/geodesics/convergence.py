"""Convergence studies against the rigid-rotation oracle."""

import logging
from dataclasses import dataclass

import numpy as np

from volimm.errors import NumericalError
from volimm.geodesics.curve import rotation_oracle
from volimm.geodesics.integrate import integrate
from volimm.models.grid import ParamGrid
from volimm.models.scenario import IntegratorConfig, Scheme

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConvergenceStudy:
    """Time steps, sup-norm errors at t_end and the fitted log-log slope."""

    dts: tuple[float, ...]
    errors: tuple[float, ...]
    slope: float

    def rows(self) -> list[tuple[float, float]]:
        """(dt, error) pairs in the order they were run."""
        return list(zip(self.dts, self.errors, strict=True))


def fit_slope(dts: tuple[float, ...], errors: tuple[float, ...]) -> float:
    """Least-squares slope of log(error) against log(dt)."""
    if len(dts) < 2:
        raise ValueError("a slope needs at least two time steps")
    slope, _ = np.polyfit(np.log(dts), np.log(errors), 1)
    return float(slope)


def convergence_study(
    scheme: Scheme,
    dts: tuple[float, ...],
    t_end: float,
    *,
    size: int = 64,
    omega: float = 1.0,
    l: int = 0,
) -> ConvergenceStudy:
    """Integrate the rotating circle at each dt and measure the error at t_end.

    Raises:
        NumericalError: If any of the runs stops before t_end.
    """
    grid = ParamGrid.circle(size)
    initial = rotation_oracle(grid, omega, 0.0)
    exact = rotation_oracle(grid, omega, t_end).f.points
    errors = []
    for dt in dts:
        n_steps = max(1, round(t_end / dt))
        cfg = IntegratorConfig(
            scheme=scheme,
            dt=dt,
            t_end=t_end,
            stride=n_steps,
            newton_tol=1e-12,
            solver_tol=1e-12,
        )
        trajectory = integrate(initial, cfg, l=l)
        if not trajectory.ok:
            raise NumericalError(f"convergence run at dt={dt} failed: {trajectory.failure}")
        err = float(np.max(np.abs(trajectory.final.f.points - exact)))
        logger.info("%s dt=%.3e error=%.3e", scheme, dt, err)
        errors.append(err)
    return ConvergenceStudy(dts=tuple(dts), errors=tuple(errors), slope=fit_slope(dts, errors))
