"""Time integration of Euler flow together with its Lagrangian flow map."""

import logging
from dataclasses import dataclass

import numpy as np

from volimm.errors import NumericalError
from volimm.euler.fields import (
    VorticityField,
    enstrophy,
    kinetic_energy,
    velocity_from_vorticity,
)
from volimm.euler.flowmap import (
    VelocityAt,
    advect_flowmap,
    flow_map_density,
    identity_flow_map,
)
from volimm.euler.vorticity import step_euler_vorticity
from volimm.geometry.immersion import DiscreteImmersion

logger = logging.getLogger(__name__)

EULER_COLUMNS = ("step", "t", "energy", "enstrophy", "omega_change", "rho_drift", "mean_omega")


@dataclass(frozen=True)
class EulerSnapshot:
    """Vorticity and flow map at one output time."""

    t: float
    vorticity: VorticityField
    flow_map: DiscreteImmersion | None = None


@dataclass(frozen=True)
class EulerRecord:
    """One row of the Euler invariant log."""

    step: int
    t: float
    energy: float
    enstrophy: float
    omega_change: float
    rho_drift: float
    mean_omega: float

    def row(self) -> tuple[float, ...]:
        """Values in the order of :data:`EULER_COLUMNS`."""
        return (
            float(self.step),
            self.t,
            self.energy,
            self.enstrophy,
            self.omega_change,
            self.rho_drift,
            self.mean_omega,
        )


@dataclass(frozen=True)
class EulerTrajectory:
    """Snapshots at the output stride and the per-step log."""

    snapshots: tuple[EulerSnapshot, ...]
    log: tuple[EulerRecord, ...]
    failure: str | None = None

    @property
    def ok(self) -> bool:
        """True when integration reached t_end."""
        return self.failure is None

    def relative_drift(self, column: str) -> float:
        """max |q(t) - q(0)| / |q(0)| for energy or enstrophy."""
        values = np.array([getattr(r, column) for r in self.log])
        scale = abs(values[0]) if values[0] != 0 else 1.0
        return float(np.max(np.abs(values - values[0])) / scale)


def _record(
    step: int,
    t: float,
    field: VorticityField,
    omega0: VorticityField,
    flow_map: DiscreteImmersion | None,
) -> EulerRecord:
    rho_drift = 0.0
    if flow_map is not None:
        rho_drift = float(np.max(np.abs(flow_map_density(flow_map) - 1.0)))
    return EulerRecord(
        step=step,
        t=t,
        energy=kinetic_energy(velocity_from_vorticity(field)),
        enstrophy=enstrophy(field),
        omega_change=float(np.max(np.abs(field.omega - omega0.omega))),
        rho_drift=rho_drift,
        mean_omega=float(np.mean(field.omega)),
    )


def _sampler(stages: dict[float, VorticityField]) -> VelocityAt:
    return lambda s: velocity_from_vorticity(stages[s])


def integrate_euler(
    omega0: VorticityField,
    dt: float,
    n_steps: int,
    stride: int,
    *,
    track_flow_map: bool = True,
) -> EulerTrajectory:
    """Step the vorticity and, optionally, carry the identity flow map along.

    The flow map needs the velocity at the half step, which is produced by an
    extra half-length vorticity step from the start of each step.
    """
    field = omega0
    flow_map = identity_flow_map(omega0.grid) if track_flow_map else None
    snapshots = [EulerSnapshot(0.0, field, flow_map)]
    log = [_record(0, 0.0, field, omega0, flow_map)]
    failure = None
    t = 0.0
    for step in range(1, n_steps + 1):
        try:
            advanced = step_euler_vorticity(field, dt)
            moved = flow_map
            if flow_map is not None:
                half = step_euler_vorticity(field, 0.5 * dt)
                stages = {t: field, t + 0.5 * dt: half, t + dt: advanced}
                moved = advect_flowmap(flow_map, _sampler(stages), t, dt)
        except NumericalError as exc:
            logger.warning("euler integration stopped at step %d: %s", step, exc)
            failure = f"step {step}: {exc}"
            break
        field, flow_map, t = advanced, moved, step * dt
        log.append(_record(step, t, field, omega0, flow_map))
        if step % stride == 0 or step == n_steps:
            snapshots.append(EulerSnapshot(t, field, flow_map))
            logger.info("euler snapshot at t=%.6g", t)

    if snapshots[-1].t != t:
        snapshots.append(EulerSnapshot(t, field, flow_map))
    return EulerTrajectory(snapshots=tuple(snapshots), log=tuple(log), failure=failure)
