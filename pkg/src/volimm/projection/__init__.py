"""L^2 and G^l projections onto the volume-preserving directions."""

from volimm.projection.dense import (
    CurveOperators,
    dense_constraint_operator,
    dense_project,
    dense_psi,
)
from volimm.projection.elliptic import SolveMethod, solve_constraint_elliptic, solve_psi
from volimm.projection.projector import (
    MultiplierRecovery,
    ProjectionDefects,
    ProjectionResult,
    decompose,
    hk_project,
    l2_project,
    project,
    projection_defects,
    recover_multiplier,
)

__all__ = [
    "CurveOperators",
    "MultiplierRecovery",
    "ProjectionDefects",
    "ProjectionResult",
    "SolveMethod",
    "decompose",
    "dense_constraint_operator",
    "dense_project",
    "dense_psi",
    "hk_project",
    "l2_project",
    "project",
    "projection_defects",
    "recover_multiplier",
    "solve_constraint_elliptic",
    "solve_psi",
]
