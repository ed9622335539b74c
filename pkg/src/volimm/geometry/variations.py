"""Closed-form first variations of the pullback metric and volume density.

These are the reference formulas that finite-difference tests compare against.
"""

import numpy as np

from volimm.geometry.immersion import DiscreteImmersion, FloatArray, ScalarField, TangentField
from volimm.geometry.spectral import partials


def pullback_metric(f: DiscreteImmersion) -> FloatArray:
    """g_ij = <d_i f, d_j f> per node, without the rank check."""
    jac = f.jacobian()
    return np.asarray(np.einsum("...ai,...aj->...ij", jac, jac))


def volume_density(f: DiscreteImmersion) -> ScalarField:
    """sqrt|det g| per node."""
    return np.sqrt(np.abs(np.linalg.det(pullback_metric(f))))


def dmetric_variation(f: DiscreteImmersion, h: TangentField) -> FloatArray:
    """Derivative of g along h: <d_i h, d_j f> + <d_j h, d_i f>."""
    dh = partials(h, f.grid)
    cross = np.einsum("...ai,...aj->...ij", dh, f.jacobian())
    return np.asarray(cross + np.swapaxes(cross, -1, -2))


def dvol_variation(f: DiscreteImmersion, h: TangentField) -> ScalarField:
    """Derivative of sqrt|g| along h: g^{ij} <d_i h, d_j f> sqrt|g|."""
    jac = f.jacobian()
    g = np.einsum("...ai,...aj->...ij", jac, jac)
    dh = partials(h, f.grid)
    trace = np.einsum("...ij,...ai,...aj->...", np.linalg.inv(g), dh, jac)
    return np.asarray(trace * np.sqrt(np.linalg.det(g)))
