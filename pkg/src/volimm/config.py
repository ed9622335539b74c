"""Environment-variable-based configuration."""

import os
from pathlib import Path


def get_log_level() -> str:
    """Return the logging level from VOLIMM_LOG_LEVEL."""
    return os.environ.get("VOLIMM_LOG_LEVEL", "WARNING")


def get_output_dir() -> Path:
    """Return the default run output directory from VOLIMM_OUTPUT_DIR."""
    return Path(os.environ.get("VOLIMM_OUTPUT_DIR", "runs")).expanduser()


def get_rank_eps() -> float:
    """Return the immersion rank threshold from VOLIMM_RANK_EPS.

    Relative to the mean metric scale of the grid.
    """
    return float(os.environ.get("VOLIMM_RANK_EPS", "1e-10"))


def get_orth_tol() -> float:
    """Return the normal/tangent orthogonality tolerance from VOLIMM_ORTH_TOL."""
    return float(os.environ.get("VOLIMM_ORTH_TOL", "1e-8"))


def get_projection_tol() -> float:
    """Return the default projection tolerance from VOLIMM_PROJECTION_TOL."""
    return float(os.environ.get("VOLIMM_PROJECTION_TOL", "1e-8"))


def get_cg_rtol() -> float:
    """Return the conjugate-gradient relative tolerance from VOLIMM_CG_RTOL."""
    return float(os.environ.get("VOLIMM_CG_RTOL", "1e-10"))


def get_cg_maxiter_factor() -> int:
    """Return the CG iteration cap per grid node from VOLIMM_CG_MAXITER_FACTOR."""
    return int(os.environ.get("VOLIMM_CG_MAXITER_FACTOR", "10"))


def get_newton_tol() -> float:
    """Return the multiplier Newton tolerance from VOLIMM_NEWTON_TOL."""
    return float(os.environ.get("VOLIMM_NEWTON_TOL", "1e-10"))


def get_newton_maxiter() -> int:
    """Return the multiplier Newton iteration cap from VOLIMM_NEWTON_MAXITER."""
    return int(os.environ.get("VOLIMM_NEWTON_MAXITER", "50"))


def get_dense_max_nodes() -> int:
    """Return the node count at or below which elliptic solves go dense (VOLIMM_DENSE_MAX_NODES)."""
    return int(os.environ.get("VOLIMM_DENSE_MAX_NODES", "256"))


def get_threads() -> int:
    """Return the default worker count for sweeps and checks from VOLIMM_THREADS."""
    return int(os.environ.get("VOLIMM_THREADS", "1"))
