"""Krylov solvers: weighted preconditioned CG, and restarted GMRES for nonsymmetric maps."""

import logging
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg, gmres

from volimm.config import get_cg_maxiter_factor, get_cg_rtol
from volimm.errors import NoConvergence
from volimm.geometry.immersion import FloatArray

logger = logging.getLogger(__name__)

FieldMap = Callable[[FloatArray], FloatArray]


@dataclass(frozen=True)
class OperatorStats:
    """Iterative (or exact) solve statistics.

    ``condition`` is a cheap lower bound on the condition number: the spread of the
    Rayleigh quotients of the operator at the right-hand side and at the solution.
    """

    iterations: int
    residual: float
    condition: float = 1.0

    @classmethod
    def exact(cls) -> "OperatorStats":
        """Stats for a direct or closed-form solve."""
        return cls(iterations=0, residual=0.0)

    def __add__(self, other: "OperatorStats") -> "OperatorStats":
        """Combine the stats of consecutive solves."""
        return OperatorStats(
            iterations=self.iterations + other.iterations,
            residual=max(self.residual, other.residual),
            condition=max(self.condition, other.condition),
        )


def _weighted_norm(x: FloatArray, weight: FloatArray) -> float:
    return float(np.sqrt(np.sum(weight * x * x)))


def solve_spd(
    apply: FieldMap,
    rhs: FloatArray,
    weight: FloatArray,
    precondition: FieldMap | None = None,
    *,
    rtol: float | None = None,
    maxiter: int | None = None,
    what: str = "cg",
) -> tuple[FloatArray, OperatorStats]:
    """Solve ``apply(x) = rhs`` for an operator positive-definite in the ``weight`` inner product.

    The weighted system ``W apply(x) = W rhs`` is symmetric in the Euclidean sense and is
    handed to scipy's CG. ``precondition`` approximates the inverse of ``apply`` on plain
    fields; it is rescaled by the mean weight.

    Raises:
        NoConvergence: If the iteration cap is reached.
    """
    rtol = rtol if rtol is not None else get_cg_rtol()
    weight = np.broadcast_to(weight, rhs.shape)
    rhs_norm = _weighted_norm(rhs, weight)
    if rhs_norm == 0.0:
        return np.zeros_like(rhs), OperatorStats.exact()

    shape, size = rhs.shape, rhs.size
    maxiter = maxiter if maxiter is not None else get_cg_maxiter_factor() * size
    flat_weight = weight.ravel()
    mean_weight = float(np.mean(flat_weight))

    def matvec(x: FloatArray) -> FloatArray:
        return flat_weight * apply(x.reshape(shape)).ravel()

    operator = LinearOperator((size, size), matvec=matvec, dtype=np.float64)
    preconditioner = None
    if precondition is not None:
        preconditioner = LinearOperator(
            (size, size),
            matvec=lambda r: precondition(r.reshape(shape)).ravel() / mean_weight,
            dtype=np.float64,
        )

    iterations = 0

    def count(_: FloatArray) -> None:
        nonlocal iterations
        iterations += 1

    solution, info = cg(
        operator,
        flat_weight * rhs.ravel(),
        rtol=rtol,
        atol=0.0,
        maxiter=maxiter,
        M=preconditioner,
        callback=count,
    )
    x = np.asarray(solution, dtype=np.float64).reshape(shape)
    applied = apply(x)
    residual = _weighted_norm(applied - rhs, weight) / rhs_norm

    rhs_applied = apply(rhs)
    quotients = [
        float(np.sum(weight * v * av)) / float(np.sum(weight * v * v))
        for v, av in ((rhs, rhs_applied), (x, applied))
        if np.any(v)
    ]
    positive = [q for q in quotients if q > 0]
    condition = max(positive) / min(positive) if positive else 1.0

    stats = OperatorStats(iterations=iterations, residual=residual, condition=condition)
    logger.debug("%s: %d iterations, residual %.3e", what, iterations, residual)
    if info > 0:
        raise NoConvergence(stats, what)
    if residual > 100 * rtol:
        logger.warning("%s residual %.3e above tolerance %.1e", what, residual, rtol)
    return x, stats


def solve_general(
    apply: FieldMap,
    rhs: FloatArray,
    precondition: FieldMap | None = None,
    *,
    rtol: float | None = None,
    maxiter: int | None = None,
    restart: int = 40,
    what: str = "gmres",
) -> tuple[FloatArray, OperatorStats]:
    """Solve ``apply(x) = rhs`` with restarted GMRES; ``precondition`` approximates the inverse.

    Raises:
        NoConvergence: If the iteration cap is reached.
    """
    rtol = rtol if rtol is not None else get_cg_rtol()
    rhs_norm = float(np.linalg.norm(rhs))
    if rhs_norm == 0.0:
        return np.zeros_like(rhs), OperatorStats.exact()

    shape, size = rhs.shape, rhs.size
    maxiter = maxiter if maxiter is not None else get_cg_maxiter_factor() * size
    restart = min(restart, size)
    operator = LinearOperator(
        (size, size), matvec=lambda x: apply(x.reshape(shape)).ravel(), dtype=np.float64
    )
    preconditioner = None
    if precondition is not None:
        preconditioner = LinearOperator(
            (size, size),
            matvec=lambda r: precondition(r.reshape(shape)).ravel(),
            dtype=np.float64,
        )

    iterations = 0

    def count(_: float) -> None:
        nonlocal iterations
        iterations += 1

    solution, info = gmres(
        operator,
        rhs.ravel(),
        rtol=rtol,
        atol=0.0,
        restart=restart,
        maxiter=max(1, maxiter // restart),
        M=preconditioner,
        callback=count,
        callback_type="pr_norm",
    )
    x = np.asarray(solution, dtype=np.float64).reshape(shape)
    residual = float(np.linalg.norm(apply(x) - rhs)) / rhs_norm
    stats = OperatorStats(iterations=iterations, residual=residual)
    logger.debug("%s: %d iterations, residual %.3e", what, iterations, residual)
    if info > 0:
        raise NoConvergence(stats, what)
    if residual > 100 * rtol:
        logger.warning("%s residual %.3e above tolerance %.1e", what, residual, rtol)
    return x, stats
