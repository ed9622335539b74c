"""Named initial-condition families.

Random families draw a fixed list of Fourier coefficients from the seed and evaluate
them on the grid, so the same seed gives the same continuous field at every resolution.
"""

import numpy as np

from volimm.euler.fields import VorticityField
from volimm.geodesics.curve import rotation_oracle, unit_circle
from volimm.geodesics.state import GeodesicState
from volimm.geometry.immersion import DiscreteImmersion, ScalarField, TangentField
from volimm.geometry.kernel import build_geometry
from volimm.models.grid import ParamGrid
from volimm.models.scenario import InitialCondition, InitialFamily
from volimm.projection.projector import l2_project

# Initial velocities are projected well below the integrator drift tolerance
_INITIAL_PROJECTION_TOL = 1e-10


def periodic_bump(x: ScalarField, center: float, width: float) -> ScalarField:
    """Smooth periodic bump exp(-(1 - cos(x - center)) / width^2), one at the center."""
    return np.asarray(np.exp(-(1.0 - np.cos(x - center)) / width**2))


def random_smooth_scalar(grid: ParamGrid, rng: np.random.Generator, modes: int) -> ScalarField:
    """Sum of trigonometric modes up to ``modes`` with decaying random amplitudes."""
    coords = [x * (2.0 * np.pi / p) for x, p in zip(grid.coordinates(), grid.periods, strict=True)]
    out = np.zeros(grid.shape)
    if grid.dim == 1:
        (theta,) = coords
        for m in range(1, modes + 1):
            a, b = rng.standard_normal(2) / (1.0 + m * m)
            out += a * np.cos(m * theta) + b * np.sin(m * theta)
        return out
    x, y = coords
    for m in range(-modes, modes + 1):
        for n in range(0, modes + 1):
            if n == 0 and m <= 0:
                continue
            a, b = rng.standard_normal(2) / (1.0 + m * m + n * n)
            phase = m * x + n * y
            out += a * np.cos(phase) + b * np.sin(phase)
    return out


def random_tangent_field(
    f: DiscreteImmersion, rng: np.random.Generator, modes: int
) -> TangentField:
    """Independent random smooth scalars in each target component."""
    return np.stack(
        [random_smooth_scalar(f.grid, rng, modes) for _ in range(f.target_dim)], axis=-1
    )


def star_curve(
    grid: ParamGrid, rng: np.random.Generator, amplitude: float = 0.05
) -> DiscreteImmersion:
    """Closed star-shaped curve r(theta) = 1 + small random modes (2 to 4)."""
    (theta,) = grid.coordinates()
    theta = theta * (2.0 * np.pi / grid.periods[0])
    radius = np.ones(grid.shape)
    for m in range(2, 5):
        a, b = amplitude * rng.standard_normal(2) / m
        radius += a * np.cos(m * theta) + b * np.sin(m * theta)
    return DiscreteImmersion(
        grid=grid, points=np.stack([radius * np.cos(theta), radius * np.sin(theta)], axis=-1)
    )


def torus_of_revolution(grid: ParamGrid, major: float, minor: float) -> DiscreteImmersion:
    """((R + r cos v) cos u, (R + r cos v) sin u, r sin v) with u along axis 0."""
    if grid.dim != 2:
        raise ValueError("a torus of revolution needs a two-dimensional grid")
    u, v = grid.coordinates()
    ring = major + minor * np.cos(v)
    return DiscreteImmersion(
        grid=grid,
        points=np.stack([ring * np.cos(u), ring * np.sin(u), minor * np.sin(v)], axis=-1),
    )


def _projected(f: DiscreteImmersion, X: TangentField) -> GeodesicState:
    cache = build_geometry(f)
    h = l2_project(f, cache, X, _INITIAL_PROJECTION_TOL).h_mu
    return GeodesicState(f=f, f_t=h)


def circle_bump(grid: ParamGrid, ic: InitialCondition) -> GeodesicState:
    """Unit circle with a radial velocity bump, projected onto the constraint."""
    f = unit_circle(grid)
    (theta,) = grid.coordinates()
    bump = ic.amplitude * periodic_bump(theta, ic.center, ic.width)
    return _projected(f, bump[..., None] * f.points)


def torus_normal_bump(grid: ParamGrid, ic: InitialCondition) -> GeodesicState:
    """Torus of revolution with a normal velocity bump, projected onto the constraint."""
    f = torus_of_revolution(grid, ic.major_radius, ic.minor_radius)
    u, v = grid.coordinates()
    normal = np.stack([np.cos(v) * np.cos(u), np.cos(v) * np.sin(u), np.sin(v)], axis=-1)
    bump = ic.amplitude * periodic_bump(u, ic.center, ic.width) * periodic_bump(v, 0.0, ic.width)
    return _projected(f, bump[..., None] * normal)


def shear_flow(grid: ParamGrid, ic: InitialCondition) -> VorticityField:
    """omega = -a cos y, the vorticity of the steady shear u = a sin y."""
    _, y = grid.coordinates()
    return VorticityField.initial(grid, -ic.omega * np.cos(y * (2.0 * np.pi / grid.periods[1])))


def random_vorticity(grid: ParamGrid, ic: InitialCondition, seed: int) -> VorticityField:
    """Seeded smooth zero-mean vorticity scaled to peak ``amplitude``."""
    omega = random_smooth_scalar(grid, np.random.default_rng(seed), ic.modes)
    peak = float(np.max(np.abs(omega)))
    if peak > 0:
        omega *= ic.amplitude / peak
    return VorticityField.initial(grid, omega)


def curve_state(grid: ParamGrid, ic: InitialCondition) -> GeodesicState:
    """Initial state of a curve geodesic run."""
    if ic.family is InitialFamily.ROTATION:
        return rotation_oracle(grid, ic.omega, 0.0)
    if ic.family is InitialFamily.CIRCLE_BUMP:
        return circle_bump(grid, ic)
    raise ValueError(f"{ic.family} does not describe a curve geodesic")


def euler_state(grid: ParamGrid, ic: InitialCondition, seed: int) -> VorticityField:
    """Initial vorticity of an Euler run."""
    if ic.family is InitialFamily.SHEAR_FLOW:
        return shear_flow(grid, ic)
    if ic.family is InitialFamily.RANDOM_FIELD:
        return random_vorticity(grid, ic, seed)
    raise ValueError(f"{ic.family} does not describe an Euler flow")
