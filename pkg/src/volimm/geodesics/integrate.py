"""Drive a geodesic scheme over a time interval and keep the invariant log."""

import logging
from typing import Protocol

import numpy as np
import pydantic

from volimm.errors import InvalidConfig, InvalidInitialData, NumericalError
from volimm.geodesics.curve import step_rk4_explicit
from volimm.geodesics.lagrangian import step_discrete_lagrangian
from volimm.geodesics.rattle import step_rattle
from volimm.geodesics.state import GeodesicState, InvariantRecord, Trajectory
from volimm.geometry.immersion import BackgroundDensity
from volimm.geometry.kernel import build_geometry, constraint_operator
from volimm.models.scenario import IntegratorConfig, Scheme
from volimm.projection.projector import project

logger = logging.getLogger(__name__)


class Stepper(Protocol):
    """One step of a geodesic scheme against a fixed background density."""

    def __call__(
        self,
        state: GeodesicState,
        dt: float,
        *,
        l: int,
        mu: BackgroundDensity,
        cfg: IntegratorConfig,
    ) -> GeodesicState:
        """Advance ``state`` by ``dt``."""
        ...


def _rk4(
    state: GeodesicState, dt: float, *, l: int, mu: BackgroundDensity, cfg: IntegratorConfig
) -> GeodesicState:
    return step_rk4_explicit(state, dt, mu, cfg.solver_tol)


def _rattle(
    state: GeodesicState, dt: float, *, l: int, mu: BackgroundDensity, cfg: IntegratorConfig
) -> GeodesicState:
    return step_rattle(state, dt, cfg.newton_tol, mu=mu, solver_tol=cfg.solver_tol)


def _lagrangian(
    state: GeodesicState, dt: float, *, l: int, mu: BackgroundDensity, cfg: IntegratorConfig
) -> GeodesicState:
    return step_discrete_lagrangian(state, dt, l, cfg.newton_tol, mu=mu, solver_tol=cfg.solver_tol)


STEPPERS: dict[Scheme, Stepper] = {
    Scheme.RK4_EXPLICIT: _rk4,
    Scheme.RATTLE: _rattle,
    Scheme.DISCRETE_LAGRANGIAN: _lagrangian,
}


def _validated(cfg: IntegratorConfig) -> IntegratorConfig:
    """Re-run field validation, which ``model_construct`` and attribute writes skip."""
    try:
        return IntegratorConfig.model_validate(cfg.model_dump())
    except pydantic.ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in err['loc'])}: {err['msg']}"
            for err in exc.errors()
        )
        raise InvalidConfig(f"integrator config rejected: {problems}") from exc


def _check_config(initial: GeodesicState, cfg: IntegratorConfig, l: int) -> None:
    curve_only = (Scheme.RK4_EXPLICIT, Scheme.DISCRETE_LAGRANGIAN)
    if cfg.scheme in curve_only and initial.f.grid.dim != 1:
        raise InvalidConfig(f"{cfg.scheme} integrates curves only")
    if cfg.scheme is Scheme.DISCRETE_LAGRANGIAN and l < 1:
        raise InvalidConfig("discrete_lagrangian needs metric order l >= 1")
    if cfg.scheme is not Scheme.DISCRETE_LAGRANGIAN and l != 0:
        raise InvalidConfig(f"{cfg.scheme} integrates the L^2 metric (l = 0) only")


def _check_initial(initial: GeodesicState, mu: BackgroundDensity, drift_tol: float) -> None:
    cache = build_geometry(initial.f, mu)
    scale = max(1.0, float(np.max(np.abs(initial.f_t))))
    residuals = {
        "rho_drift": cache.rho_drift(),
        "residual": float(np.max(np.abs(constraint_operator(cache, initial.f_t)))) / scale,
    }
    if any(value > drift_tol for value in residuals.values()):
        raise InvalidInitialData(residuals)


def integrate(
    initial: GeodesicState,
    cfg: IntegratorConfig,
    *,
    l: int = 0,
    mu: BackgroundDensity | None = None,
) -> Trajectory:
    """Integrate from ``initial`` to ``cfg.t_end``.

    Numerical failures part way do not raise: the trajectory up to the failing step is
    returned with ``failure`` set.

    Raises:
        InvalidConfig: For out-of-range step settings or a scheme that does not fit the state.
        InvalidInitialData: If the initial state is off the constraint set.
    """
    cfg = _validated(cfg)
    _check_config(initial, cfg, l)
    mu = mu if mu is not None else BackgroundDensity.from_immersion(initial.f)
    _check_initial(initial, mu, cfg.drift_tol)
    stepper = STEPPERS[cfg.scheme]
    n_steps = cfg.n_steps
    logger.info(
        "integrating %s: %d steps of dt=%.3e, l=%d, grid %s",
        cfg.scheme,
        n_steps,
        cfg.dt,
        l,
        initial.f.grid.shape,
    )

    state = initial
    snapshots = [state]
    log = [InvariantRecord.measure(0, state, build_geometry(state.f, mu), l)]
    failure = None
    for step in range(1, n_steps + 1):
        try:
            advanced = stepper(state, cfg.dt, l=l, mu=mu, cfg=cfg)
            cache = build_geometry(advanced.f, mu)
            if cfg.renormalize:
                reprojected = project(advanced.f, cache, advanced.f_t, l, cfg.solver_tol)
                advanced = GeodesicState(
                    f=advanced.f, f_t=reprojected.h_mu, t=advanced.t, p=advanced.p
                )
                logger.info("step %d: velocity re-projected", step)
            record = InvariantRecord.measure(step, advanced, cache, l, cfg.renormalize)
        except NumericalError as exc:
            logger.warning("integration stopped at step %d (t=%.6g): %s", step, state.t, exc)
            failure = f"step {step}: {exc}"
            break
        state = advanced
        log.append(record)
        if step % cfg.stride == 0 or step == n_steps:
            snapshots.append(state)

    if snapshots[-1] is not state:
        snapshots.append(state)
    return Trajectory(
        snapshots=tuple(snapshots),
        invariant_log=tuple(log),
        mu=mu,
        l=l,
        failure=failure,
    )
