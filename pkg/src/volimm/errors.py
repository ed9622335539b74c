"""Exception hierarchy.

Two branches: ``NumericalError`` for solves and integrations that fail on valid input,
``ValidationError`` for input that never reaches the numerics. The CLI maps them to exit
codes 3 and 2.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from volimm.sobolev.krylov import OperatorStats


class VolimmError(Exception):
    """Base class for all library errors."""


class NumericalError(VolimmError):
    """A numerical operation could not produce a result within tolerance."""


class ValidationError(VolimmError):
    """Input rejected before any numerical work."""


class RankDeficient(NumericalError):
    """The Jacobian of an immersion lost rank at some node."""

    def __init__(self, node: tuple[int, ...], value: float, threshold: float) -> None:
        """Record the worst node and its metric determinant."""
        super().__init__(f"det g = {value:.3e} <= {threshold:.3e} at node {node}")
        self.node = node
        self.value = value
        self.threshold = threshold


class NoConvergence(NumericalError):
    """An iterative solver hit its iteration cap."""

    def __init__(self, stats: OperatorStats, what: str = "solver") -> None:
        """Keep the solver statistics for the caller."""
        super().__init__(
            f"{what} did not converge: {stats.iterations} iterations, "
            f"relative residual {stats.residual:.3e}"
        )
        self.stats = stats


class MinimalImmersion(NumericalError):
    """The mean curvature vanishes identically where a non-minimal immersion is required."""


class MinimalIncompatibleRHS(NumericalError):
    """A minimal-branch elliptic solve received a right-hand side with nonzero mean."""

    def __init__(self, mean: float, tol: float) -> None:
        """Record the offending mean."""
        super().__init__(
            f"right-hand side mean {mean:.3e} exceeds {tol:.3e} on a minimal immersion"
        )
        self.mean = mean


class ConstraintSolveFailed(NumericalError):
    """The position-level multiplier iteration of a constrained step did not converge."""

    def __init__(self, iterations: int, residual: float) -> None:
        """Record iteration count and final constraint residual."""
        super().__init__(f"constraint solve failed after {iterations} iterations ({residual:.3e})")
        self.iterations = iterations
        self.residual = residual


class NewtonFailed(ConstraintSolveFailed):
    """The Newton iteration of the discrete Euler-Lagrange equations did not converge."""


class CFLViolation(NumericalError):
    """A flow step was requested with a time step above the CFL bound."""

    def __init__(self, dt: float, bound: float) -> None:
        """Record the requested step and the bound."""
        super().__init__(f"dt = {dt:.3e} exceeds CFL bound {bound:.3e}")
        self.dt = dt
        self.bound = bound


class InvalidConfig(ValidationError):
    """An integrator or run configuration is out of range."""


class InvalidInitialData(ValidationError):
    """Initial data violates the constraint it must start on."""

    def __init__(self, residuals: dict[str, float]) -> None:
        """Record the residual report."""
        report = ", ".join(f"{k}={v:.3e}" for k, v in residuals.items())
        super().__init__(f"initial data off the constraint set: {report}")
        self.residuals = residuals


class _FieldErrors(ValidationError):
    def __init__(self, path: str, errors: list[dict[str, Any]]) -> None:
        messages = "; ".join(f"{e['path']}: {e['msg']}" for e in errors)
        super().__init__(f"{path}: {messages}" if messages else path)
        self.path = path
        self.errors = errors


class SchemaError(_FieldErrors):
    """A scenario document has unknown, missing or mistyped keys."""


class RangeError(_FieldErrors):
    """A scenario value is outside its documented range."""


class MissingRun(ValidationError):
    """A run directory does not hold a completed run."""
