from pinnbench.training.loop import (
    METHODS,
    UNSUPPORTED,
    Method,
    TrainLoopConfig,
    TrainResult,
    check_supported,
    group_gradients,
    method_ids,
    reference_set,
    train,
)
from pinnbench.training.losses import (
    PINN_W,
    VANILLA,
    BoundarySet,
    LossBreakdown,
    LossWeights,
    PointSets,
    assemble_loss,
    boundary_residual,
    pde_residual,
    sample_points,
)
from pinnbench.training.model import FieldModel, build_model
from pinnbench.training.optim import (
    LBFGS,
    AdamState,
    MultiAdamState,
    adam_direction,
    adam_step,
    lbfgs_step,
    multiadam_step,
)
from pinnbench.training.rar import RARPolicy, rar_refine, top_k
from pinnbench.training.reweight import ReweightPolicy, lra_update, ntk_update, ntk_weights, term_traces
from pinnbench.training.vpinn import (
    VPINNConfig,
    cell_quadrature,
    gauss_legendre,
    legendre_values,
    tested_residuals,
    vpinn_loss,
    vpinn_terms,
)

__all__ = [
    "LBFGS",
    "METHODS",
    "PINN_W",
    "UNSUPPORTED",
    "VANILLA",
    "AdamState",
    "BoundarySet",
    "FieldModel",
    "LossBreakdown",
    "LossWeights",
    "Method",
    "MultiAdamState",
    "PointSets",
    "RARPolicy",
    "ReweightPolicy",
    "TrainLoopConfig",
    "TrainResult",
    "VPINNConfig",
    "adam_direction",
    "adam_step",
    "assemble_loss",
    "boundary_residual",
    "build_model",
    "cell_quadrature",
    "check_supported",
    "gauss_legendre",
    "group_gradients",
    "lbfgs_step",
    "legendre_values",
    "lra_update",
    "method_ids",
    "multiadam_step",
    "ntk_update",
    "ntk_weights",
    "pde_residual",
    "rar_refine",
    "reference_set",
    "sample_points",
    "term_traces",
    "tested_residuals",
    "top_k",
    "train",
    "vpinn_loss",
    "vpinn_terms",
]
