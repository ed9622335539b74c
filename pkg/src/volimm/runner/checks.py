"""The invariant suite behind the ``check`` subcommand.

Each check runs one property or oracle comparison at reference resolution and
reports the measured value against its threshold.
"""

import logging
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from volimm.errors import VolimmError
from volimm.euler.crosscheck import crosscheck_general_projection
from volimm.euler.evolve import integrate_euler
from volimm.euler.fields import VorticityField
from volimm.geodesics.convergence import convergence_study, fit_slope
from volimm.geodesics.curve import rotation_oracle, unit_circle
from volimm.geodesics.integrate import integrate
from volimm.geodesics.state import Trajectory
from volimm.geometry.kernel import build_geometry
from volimm.geometry.spectral import partial
from volimm.geometry.variations import (
    dmetric_variation,
    dvol_variation,
    pullback_metric,
    volume_density,
)
from volimm.models.grid import ParamGrid
from volimm.models.record import CheckResult
from volimm.models.scenario import InitialCondition, InitialFamily, IntegratorConfig, Scheme
from volimm.projection.dense import dense_project
from volimm.projection.projector import hk_project, l2_project, projection_defects
from volimm.runner.initial import (
    circle_bump,
    random_smooth_scalar,
    random_tangent_field,
    shear_flow,
    star_curve,
)
from volimm.sobolev.operators import apply_Psi, psi_symbol_probe

logger = logging.getLogger(__name__)

Check = Callable[[], list[CheckResult]]

_SEED = 20240229


def _result(name: str, value: float, threshold: float, detail: str | None = None) -> CheckResult:
    return CheckResult(
        name=name, value=value, threshold=threshold, passed=value <= threshold, detail=detail
    )


def _band(name: str, value: float, target: float, halfwidth: float) -> CheckResult:
    return CheckResult(
        name=name,
        value=value,
        threshold=halfwidth,
        passed=abs(value - target) <= halfwidth,
        detail=f"target {target}",
    )


def _shortfall(trajectory: Trajectory, t_end: float) -> str | None:
    """Why a trajectory does not cover [0, t_end], or None when it does."""
    if trajectory.failure is not None:
        return trajectory.failure
    if trajectory.final.t < t_end - 1e-9 * max(1.0, t_end):
        return f"stopped at t={trajectory.final.t:.6g} before t_end={t_end:.6g}"
    return None


def _over_runs(
    name: str, value: float, threshold: float, t_end: float, *runs: Trajectory
) -> CheckResult:
    """Like :func:`_result`, but FAIL when any of ``runs`` stopped short of t_end."""
    for trajectory in runs:
        reason = _shortfall(trajectory, t_end)
        if reason is not None:
            return CheckResult(
                name=name,
                value=value,
                threshold=threshold,
                passed=False,
                detail=f"incomplete run: {reason}",
            )
    return _result(name, value, threshold)


def check_circle_projection() -> list[CheckResult]:
    """Closed forms on the round circle: P(c) = 0 with p = -1, P(c') = c' with p = 0."""
    grid = ParamGrid.circle(64)
    f = unit_circle(grid)
    cache = build_geometry(f)
    radial = l2_project(f, cache, f.points)
    tangent = f.jacobian()[..., 0]
    along = l2_project(f, cache, tangent)
    value = max(
        float(np.max(np.abs(radial.h_mu))),
        float(np.max(np.abs(radial.p + 1.0))),
        float(np.max(np.abs(along.h_mu - tangent))),
        float(np.max(np.abs(along.p))),
    )
    return [_result("circle_projection_closed_forms", value, 1e-8)]


def _whip_config(scheme: Scheme, t_end: float) -> IntegratorConfig:
    return IntegratorConfig(scheme=scheme, dt=1e-3, t_end=t_end, stride=100)


def check_rotation_oracle() -> list[CheckResult]:
    """Rigid rotation reproduced by rk4 and rattle, with the expected orders."""
    grid = ParamGrid.circle(128)
    initial = rotation_oracle(grid, 1.0, 0.0)
    exact = rotation_oracle(grid, 1.0, 1.0).f.points
    results = []
    for scheme, threshold in ((Scheme.RK4_EXPLICIT, 1e-6), (Scheme.RATTLE, 1e-5)):
        trajectory = integrate(initial, _whip_config(scheme, 1.0))
        err = float(np.max(np.abs(trajectory.final.f.points - exact)))
        results.append(_over_runs(f"rotation_oracle_{scheme}", err, threshold, 1.0, trajectory))
    rk4 = convergence_study(Scheme.RK4_EXPLICIT, (0.08, 0.04, 0.02), 1.0)
    rattle = convergence_study(Scheme.RATTLE, (0.05, 0.025, 0.0125), 1.0)
    results.append(_band("convergence_slope_rk4", rk4.slope, 4.0, 0.3))
    results.append(_band("convergence_slope_rattle", rattle.slope, 2.0, 0.2))
    return results


def _whip() -> InitialCondition:
    return InitialCondition(family=InitialFamily.CIRCLE_BUMP)


def check_constraint_preservation() -> list[CheckResult]:
    """rho stays at one under rattle; rk4 drift is bounded."""
    initial = circle_bump(ParamGrid.circle(128), _whip())
    rattle = integrate(initial, _whip_config(Scheme.RATTLE, 1.0))
    rk4 = integrate(initial, _whip_config(Scheme.RK4_EXPLICIT, 1.0))
    return [
        _over_runs("rattle_rho_drift", rattle.max_rho_drift(), 1e-8, 1.0, rattle),
        _over_runs("rk4_rho_drift", rk4.max_rho_drift(), 1e-6, 1.0, rk4),
    ]


def check_energy_conservation() -> list[CheckResult]:
    """G^l energy drift of the structure-preserving schemes over unit time."""
    initial = circle_bump(ParamGrid.circle(128), _whip())
    rattle = integrate(initial, _whip_config(Scheme.RATTLE, 1.0))
    lagrangian = integrate(initial, _whip_config(Scheme.DISCRETE_LAGRANGIAN, 1.0), l=1)
    return [
        _over_runs("energy_drift_l0_rattle", rattle.energy_drift(), 1e-6, 1.0, rattle),
        _over_runs(
            "energy_drift_l1_discrete_lagrangian", lagrangian.energy_drift(), 1e-6, 1.0, lagrangian
        ),
    ]


def check_psi() -> list[CheckResult]:
    """Self-adjointness, negativity, symbol scaling and the l = 0 reduction of Psi."""
    rng = np.random.default_rng(_SEED)
    grid = ParamGrid.circle(64)
    star = build_geometry(star_curve(grid, rng))
    p = random_smooth_scalar(grid, rng, 6)
    q = random_smooth_scalar(grid, rng, 6)
    results = []
    for l in (0, 1, 2):
        psi_p, psi_q = apply_Psi(star, p, l, 1e-12), apply_Psi(star, q, l, 1e-12)
        pq, qp = star.integrate(psi_p * q), star.integrate(p * psi_q)
        defect = abs(pq - qp) / max(abs(pq), abs(qp), 1e-300)
        results.append(_result(f"psi_self_adjoint_l{l}", defect, 1e-9))
        quadratic = star.integrate(psi_p * p)
        results.append(
            CheckResult(
                name=f"psi_negative_l{l}", value=quadratic, threshold=0.0, passed=quadratic < 0.0
            )
        )

    circle = build_geometry(unit_circle(grid))
    k = grid.sizes[0] // 4
    for l in (0, 1, 2):
        multiplier = psi_symbol_probe(circle, l, k)
        scaled = abs(multiplier) * (1.0 + k * k) ** l / (k * k)
        results.append(_band(f"psi_symbol_l{l}", scaled, 1.0, 0.05))

    reduction = apply_Psi(circle, p, 0) - (partial(partial(p, grid, 0), grid, 0) - p)
    results.append(_result("psi_l0_circle_reduction", float(np.max(np.abs(reduction))), 1e-10))
    return results


def check_projection_properties() -> list[CheckResult]:
    """Idempotency and orthogonality of both projections and agreement with dense solves."""
    rng = np.random.default_rng(_SEED)
    results = []
    for size in (32, 64):
        grid = ParamGrid.circle(size)
        f = star_curve(grid, np.random.default_rng(_SEED))
        cache = build_geometry(f)
        X = random_tangent_field(f, rng, 6)
        for l in (0, 1, 2):
            result = l2_project(f, cache, X) if l == 0 else hk_project(f, cache, X, l)
            defects = projection_defects(f, cache, X, result)
            results.append(_result(f"idempotency_N{size}_l{l}", defects.idempotency, 1e-7))
            results.append(_result(f"orthogonality_N{size}_l{l}", defects.orthogonality, 1e-7))
            if size == 32:
                h_dense, _ = dense_project(cache, X, l)
                gap = float(np.max(np.abs(h_dense - result.h_mu))) / float(np.max(np.abs(X)))
                results.append(_result(f"dense_agreement_l{l}", gap, 1e-8))
    return results


def check_variations() -> list[CheckResult]:
    """Finite-difference slopes of the first variations of vol and g."""
    rng = np.random.default_rng(_SEED)
    f = star_curve(ParamGrid.circle(64), rng)
    h = random_tangent_field(f, rng, 4)
    eps = (1e-3, 1e-4, 1e-5, 1e-6)
    vol_errors, metric_errors = [], []
    for e in eps:
        moved = f.displaced(h, e)
        dvol = (volume_density(moved) - volume_density(f)) / e - dvol_variation(f, h)
        dg = (pullback_metric(moved) - pullback_metric(f)) / e - dmetric_variation(f, h)
        vol_errors.append(float(np.max(np.abs(dvol))))
        metric_errors.append(float(np.max(np.abs(dg))))
    return [
        _band("dvol_fd_slope", fit_slope(eps, tuple(vol_errors)), 1.0, 0.1),
        _band("dmetric_fd_slope", fit_slope(eps, tuple(metric_errors)), 1.0, 0.1),
    ]


def check_euler() -> list[CheckResult]:
    """Shear steadiness, conservation laws, Leray agreement and flow-map volume."""
    grid = ParamGrid.torus(64)
    shear = shear_flow(grid, InitialCondition(family=InitialFamily.SHEAR_FLOW))
    steady = integrate_euler(shear, 1e-3, 1000, 1000, track_flow_map=False)
    flow = integrate_euler(shear, 1e-3, 500, 500)

    rng = np.random.default_rng(_SEED)
    omega = random_smooth_scalar(grid, rng, 4)
    random_flow = integrate_euler(
        VorticityField.initial(grid, omega), 1e-3, 1000, 1000, track_flow_map=False
    )
    h = np.stack([random_smooth_scalar(grid, rng, 6) for _ in range(2)], axis=-1)
    report = crosscheck_general_projection(h, grid)
    return [
        _result("shear_steady", steady.log[-1].omega_change, 1e-8),
        _result("euler_energy_drift", random_flow.relative_drift("energy"), 1e-6),
        _result("euler_enstrophy_drift", random_flow.relative_drift("enstrophy"), 1e-6),
        _result(
            "leray_crosscheck", max(report.h_mu_disagreement, report.p_disagreement), 1e-9
        ),
        _result("flow_map_rho_drift", max(r.rho_drift for r in flow.log), 1e-6),
    ]


def check_cross_integrator() -> list[CheckResult]:
    """rk4 and rattle whip trajectories agree over a quarter time unit."""
    initial = circle_bump(ParamGrid.circle(128), _whip())
    rk4 = integrate(initial, _whip_config(Scheme.RK4_EXPLICIT, 0.25))
    rattle = integrate(initial, _whip_config(Scheme.RATTLE, 0.25))
    gap = float(np.max(np.abs(rk4.final.f.points - rattle.final.f.points)))
    return [_over_runs("rk4_vs_rattle", gap, 1e-4, 0.25, rk4, rattle)]


CHECKS: dict[str, Check] = {
    "circle_projection": check_circle_projection,
    "rotation_oracle": check_rotation_oracle,
    "constraint_preservation": check_constraint_preservation,
    "energy_conservation": check_energy_conservation,
    "psi": check_psi,
    "projection_properties": check_projection_properties,
    "variations": check_variations,
    "euler": check_euler,
    "cross_integrator": check_cross_integrator,
}


def _guarded(name: str, check: Check) -> list[CheckResult]:
    logger.info("Running check %s", name)
    try:
        return check()
    except (VolimmError, ArithmeticError, ValueError) as exc:
        logger.warning("Check %s raised: %s", name, exc)
        detail = f"{type(exc).__name__}: {exc}"
        return [
            CheckResult(name=name, value=float("nan"), threshold=0.0, passed=False, detail=detail)
        ]


def run_checks(threads: int = 1, names: list[str] | None = None) -> list[CheckResult]:
    """Run the suite (or the named subset) and return results in suite order."""
    selected = [(n, CHECKS[n]) for n in (names or list(CHECKS))]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        batches = list(pool.map(lambda item: _guarded(*item), selected))
    return [result for batch in batches for result in batch]
