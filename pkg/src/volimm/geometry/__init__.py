"""Discrete geometry of immersions on periodic grids."""

from volimm.geometry.immersion import (
    BackgroundDensity,
    DiscreteImmersion,
    ParamVectorField,
    ScalarField,
    TangentField,
    TargetKind,
)
from volimm.geometry.kernel import (
    GeometryCache,
    MetricField,
    build_geometry,
    constraint_adjoint,
    constraint_operator,
    constraint_residual,
    constraint_residual_trace_form,
    div_g,
    grad_g,
    laplace_beltrami,
    split_tangent,
)
from volimm.geometry.variations import dmetric_variation, dvol_variation, volume_density

__all__ = [
    "BackgroundDensity",
    "DiscreteImmersion",
    "GeometryCache",
    "MetricField",
    "ParamVectorField",
    "ScalarField",
    "TangentField",
    "TargetKind",
    "build_geometry",
    "constraint_adjoint",
    "constraint_operator",
    "constraint_residual",
    "constraint_residual_trace_form",
    "div_g",
    "dmetric_variation",
    "dvol_variation",
    "grad_g",
    "laplace_beltrami",
    "split_tangent",
    "volume_density",
]
