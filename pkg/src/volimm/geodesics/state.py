"""Geodesic states, per-step invariant records and trajectories."""

from dataclasses import dataclass, field

import numpy as np

from volimm.geometry.immersion import (
    BackgroundDensity,
    DiscreteImmersion,
    ScalarField,
    TangentField,
)
from volimm.geometry.kernel import GeometryCache, constraint_operator
from volimm.sobolev.operators import inner_product_Gl


@dataclass(frozen=True)
class GeodesicState:
    """Position, velocity and time; ``p`` is the multiplier of the step that produced it."""

    f: DiscreteImmersion
    f_t: TangentField
    t: float = 0.0
    p: ScalarField | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        """Check that the velocity lives along f."""
        if self.f_t.shape != self.f.points.shape:
            raise ValueError(
                f"velocity shape {self.f_t.shape} does not match {self.f.points.shape}"
            )


def reverse(state: GeodesicState) -> GeodesicState:
    """The same state with the velocity negated."""
    return GeodesicState(f=state.f, f_t=-state.f_t, t=state.t, p=state.p)


def energy(cache: GeometryCache, f_t: TangentField, l: int = 0) -> float:
    """G^l(f_t, f_t)."""
    return inner_product_Gl(cache, f_t, f_t, l)


@dataclass(frozen=True)
class InvariantRecord:
    """One row of the invariant log."""

    step: int
    t: float
    energy: float
    rho_drift: float
    residual: float
    p_min: float
    p_max: float
    renormalized: bool = False

    @classmethod
    def measure(
        cls,
        step: int,
        state: GeodesicState,
        cache: GeometryCache,
        l: int,
        renormalized: bool = False,
    ) -> "InvariantRecord":
        """Evaluate all invariants at a state."""
        p = state.p if state.p is not None else np.zeros(1)
        return cls(
            step=step,
            t=state.t,
            energy=energy(cache, state.f_t, l),
            rho_drift=cache.rho_drift(),
            residual=float(np.max(np.abs(constraint_operator(cache, state.f_t)))),
            p_min=float(np.min(p)),
            p_max=float(np.max(p)),
            renormalized=renormalized,
        )

    def row(self) -> tuple[float, ...]:
        """Values in column order of :data:`INVARIANT_COLUMNS`."""
        return (
            float(self.step),
            self.t,
            self.energy,
            self.rho_drift,
            self.residual,
            self.p_min,
            self.p_max,
            float(self.renormalized),
        )


INVARIANT_COLUMNS = (
    "step",
    "t",
    "energy",
    "rho_drift",
    "residual",
    "p_min",
    "p_max",
    "renormalized",
)


@dataclass(frozen=True)
class Trajectory:
    """Snapshots at the output stride plus the full invariant log.

    A run that failed part way keeps everything up to the failure and names it in
    ``failure``.
    """

    snapshots: tuple[GeodesicState, ...]
    invariant_log: tuple[InvariantRecord, ...]
    mu: BackgroundDensity
    l: int = 0
    failure: str | None = None

    @property
    def final(self) -> GeodesicState:
        """Last stored snapshot."""
        return self.snapshots[-1]

    @property
    def ok(self) -> bool:
        """True when integration reached t_end."""
        return self.failure is None

    def energy_drift(self) -> float:
        """max |E(t) - E(0)| / E(0) over the log (absolute when E(0) = 0)."""
        energies = np.array([r.energy for r in self.invariant_log])
        scale = energies[0] if energies[0] > 0 else 1.0
        return float(np.max(np.abs(energies - energies[0])) / scale)

    def max_rho_drift(self) -> float:
        """Largest |rho - 1| seen."""
        return max(r.rho_drift for r in self.invariant_log)

    def max_residual(self) -> float:
        """Largest velocity constraint residual seen."""
        return max(r.residual for r in self.invariant_log)
