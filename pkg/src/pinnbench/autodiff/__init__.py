from pinnbench.autodiff.derivs import DerivativeBundle, compute_bundle, multi_index_to_path
from pinnbench.autodiff.dual import Dual, input_derivative
from pinnbench.autodiff.fdcheck import central_diff, finite_difference_check, param_fd_gradient, rel_err
from pinnbench.autodiff.tape import ComputationGraph, GradientVector, Var

__all__ = [
    "ComputationGraph",
    "DerivativeBundle",
    "Dual",
    "GradientVector",
    "Var",
    "central_diff",
    "compute_bundle",
    "finite_difference_check",
    "input_derivative",
    "multi_index_to_path",
    "param_fd_gradient",
    "rel_err",
]
