from __future__ import annotations

import math
from dataclasses import dataclass

import torch
from torch import nn

from pinnbench import DTYPE
from pinnbench.errors import ContractError, EvaluationError

ACTIVATIONS = {
    "tanh": torch.tanh,
    "sin": torch.sin,
    "sigmoid": torch.sigmoid,
}

ADAPTIVE_MODES = ("none", "global", "local")


@dataclass(frozen=True)
class NetworkSpec:
    """Shape and activation of an MLP approximator.

    ``adaptive`` is "none", "global" (one trainable slope, GAAF) or "local"
    (one slope per hidden neuron, LAAF). Hidden units compute
    ``act(slope_scale * a * z)``.
    """

    input_dim: int
    output_dim: int
    hidden: tuple[int, ...] = (100,) * 5
    activation: str = "tanh"
    adaptive: str = "none"
    slope_scale: float = 10.0

    def __post_init__(self):
        if self.input_dim < 1 or self.output_dim < 1 or any(w < 1 for w in self.hidden):
            raise ContractError("network widths must be positive")
        if self.activation not in ACTIVATIONS:
            raise ContractError(f"unknown activation {self.activation!r}")
        if self.adaptive not in ADAPTIVE_MODES:
            raise ContractError(f"adaptive mode must be one of {ADAPTIVE_MODES}")
        if self.slope_scale <= 0:
            raise ContractError("slope_scale must be positive")

    @property
    def sizes(self):
        return (self.input_dim, *self.hidden, self.output_dim)

    def n_slopes(self):
        if self.adaptive == "global":
            return 1
        if self.adaptive == "local":
            return sum(self.hidden)
        return 0

    def n_params(self):
        s = self.sizes
        return sum(s[i] * s[i + 1] + s[i + 1] for i in range(len(s) - 1)) + self.n_slopes()

    def describe(self):
        return {
            "input_dim": self.input_dim,
            "output_dim": self.output_dim,
            "hidden": list(self.hidden),
            "activation": self.activation,
            "adaptive": self.adaptive,
            "slope_scale": self.slope_scale,
        }


def adaptive_activation(a, n, z, act=torch.tanh):
    return act(n * a * z)


class MLP(nn.Module):
    """Fully connected network with a linear output layer.

    Registry order is all weight matrices, then all biases, then slopes; the
    flat ordering used by optimizers and checkpoints follows it.
    """

    def __init__(self, spec: NetworkSpec):
        super().__init__()
        self.spec = spec
        sizes = spec.sizes
        self.weights = nn.ParameterList(
            [nn.Parameter(torch.zeros(sizes[i], sizes[i + 1], dtype=DTYPE)) for i in range(len(sizes) - 1)]
        )
        self.biases = nn.ParameterList(
            [nn.Parameter(torch.zeros(sizes[i + 1], dtype=DTYPE)) for i in range(len(sizes) - 1)]
        )
        if spec.adaptive == "global":
            self.slopes = nn.ParameterList([nn.Parameter(torch.full((1,), 1.0 / spec.slope_scale, dtype=DTYPE))])
        elif spec.adaptive == "local":
            self.slopes = nn.ParameterList(
                [nn.Parameter(torch.full((w,), 1.0 / spec.slope_scale, dtype=DTYPE)) for w in spec.hidden]
            )
        else:
            self.slopes = nn.ParameterList()
        self._act = ACTIVATIONS[spec.activation]

    def registry(self):
        return [name for name, _ in self.named_parameters()]

    def forward(self, x):
        h = x
        n_hidden = len(self.weights) - 1
        for i in range(n_hidden):
            z = h @ self.weights[i] + self.biases[i]
            if self.spec.adaptive == "none":
                h = self._act(z)
            else:
                a = self.slopes[0] if self.spec.adaptive == "global" else self.slopes[i]
                h = adaptive_activation(a, self.spec.slope_scale, z, self._act)
        return h @ self.weights[-1] + self.biases[-1]


def init_params(spec: NetworkSpec, seed: int) -> MLP:
    """Glorot-uniform weights, zero biases, slopes at 1/n."""
    net = MLP(spec)
    gen = torch.Generator().manual_seed(int(seed))
    with torch.no_grad():
        for W in net.weights:
            fan_in, fan_out = W.shape
            bound = math.sqrt(6.0 / (fan_in + fan_out))
            W.copy_((torch.rand(W.shape, generator=gen, dtype=DTYPE) * 2.0 - 1.0) * bound)
    return net


def forward(net: MLP, x):
    x = torch.as_tensor(x, dtype=DTYPE)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.shape[-1] != net.spec.input_dim:
        raise ContractError(f"input dimension {x.shape[-1]} != {net.spec.input_dim}")
    y = net(x)
    if not torch.isfinite(y).all():
        raise EvaluationError("non-finite network output")
    return y[0] if single else y


def flat_params(module: nn.Module) -> torch.Tensor:
    return torch.cat([p.detach().reshape(-1) for p in module.parameters()])


def set_flat_params(module: nn.Module, flat: torch.Tensor) -> None:
    i = 0
    with torch.no_grad():
        for p in module.parameters():
            n = p.numel()
            p.copy_(flat[i : i + n].view_as(p))
            i += n
