"""Sobolev metric operators: L, G^l and Psi."""

from volimm.sobolev.krylov import OperatorStats, solve_general, solve_spd
from volimm.sobolev.operators import (
    MAX_ORDER,
    apply_L,
    apply_Psi,
    apply_Psi_curve,
    inner_product_Gl,
    invert_L,
    is_constant_speed,
    psi_factorized,
    psi_symbol_probe,
)

__all__ = [
    "MAX_ORDER",
    "OperatorStats",
    "apply_L",
    "apply_Psi",
    "apply_Psi_curve",
    "inner_product_Gl",
    "invert_L",
    "is_constant_speed",
    "psi_factorized",
    "psi_symbol_probe",
    "solve_general",
    "solve_spd",
]
