from pinnbench.network.checkpoint import load_checkpoint, read_header, save_checkpoint
from pinnbench.network.fbpinn import (
    FBPINN,
    FBPINNSpec,
    fbpinn_forward,
    init_fbpinn,
    normalize,
    window_weight,
    window_weights,
)
from pinnbench.network.mlp import (
    MLP,
    NetworkSpec,
    adaptive_activation,
    flat_params,
    forward,
    init_params,
    set_flat_params,
)

__all__ = [
    "FBPINN",
    "FBPINNSpec",
    "MLP",
    "NetworkSpec",
    "adaptive_activation",
    "fbpinn_forward",
    "flat_params",
    "forward",
    "init_fbpinn",
    "init_params",
    "load_checkpoint",
    "normalize",
    "read_header",
    "save_checkpoint",
    "set_flat_params",
    "window_weight",
    "window_weights",
]
