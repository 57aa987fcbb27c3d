from pinnbench.pde.case import (
    CHALLENGES,
    BoundarySpec,
    InverseSpec,
    PDECase,
    analytic,
    analytic_coefficient,
    bundle_for,
    residual,
    solution_fn,
    truth_residual,
)
from pinnbench.pde.cases import RUNTIME_PRIOR, build_case, case_ids, declared_params
from pinnbench.pde.geometry import Ball, Box, Difference, SpaceTime, Union, sample_boundary, sample_interior
from pinnbench.pde.reference import (
    ReferenceSolution,
    coefficient_reference,
    load_reference,
    observed_data,
    reference_for,
    reference_grid,
)

__all__ = [
    "CHALLENGES",
    "RUNTIME_PRIOR",
    "Ball",
    "BoundarySpec",
    "Box",
    "Difference",
    "InverseSpec",
    "PDECase",
    "ReferenceSolution",
    "SpaceTime",
    "Union",
    "analytic",
    "analytic_coefficient",
    "build_case",
    "bundle_for",
    "case_ids",
    "coefficient_reference",
    "declared_params",
    "load_reference",
    "observed_data",
    "reference_for",
    "reference_grid",
    "residual",
    "sample_boundary",
    "sample_interior",
    "solution_fn",
    "truth_residual",
]
