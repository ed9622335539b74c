"""Agreement of the general projection with Leray at the identity flow map."""

import logging
from dataclasses import dataclass

import numpy as np

from volimm.euler.fields import VelocityField2D, gradient_potential, leray_project
from volimm.euler.flowmap import identity_flow_map
from volimm.geometry.immersion import TangentField
from volimm.geometry.kernel import build_geometry
from volimm.models.grid import ParamGrid
from volimm.projection.projector import decompose

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CrosscheckReport:
    """Relative sup disagreements between the two decompositions."""

    h_mu_disagreement: float
    p_disagreement: float

    def within(self, tol: float) -> bool:
        """True when both disagreements are at most ``tol``."""
        return self.h_mu_disagreement <= tol and self.p_disagreement <= tol


def crosscheck_general_projection(
    h: TangentField, grid: ParamGrid, tol: float | None = None
) -> CrosscheckReport:
    """Decompose h along the identity of T^2 both ways and compare.

    On the identity TrS vanishes, so the general projection reduces to Helmholtz-Hodge:
    its h_mu is the Leray projection and its p the (zero-mean) scalar potential.
    """
    f = identity_flow_map(grid)
    cache = build_geometry(f)
    general = decompose(f, cache, h, tol)
    field = VelocityField2D.from_tangent(grid, h)
    leray = leray_project(field).as_tangent()
    phi = gradient_potential(field)

    scale = max(float(np.max(np.abs(h))), 1e-300)
    p_general = general.p - float(np.mean(general.p))
    report = CrosscheckReport(
        h_mu_disagreement=float(np.max(np.abs(general.h_mu - leray))) / scale,
        p_disagreement=float(np.max(np.abs(p_general - phi))) / scale,
    )
    logger.debug(
        "crosscheck at %s: h_mu %.3e, p %.3e",
        grid.shape,
        report.h_mu_disagreement,
        report.p_disagreement,
    )
    return report
