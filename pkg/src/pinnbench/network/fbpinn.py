"""Finite-basis composite network: overlapping subdomains, each with its own
normalized subnetwork, blended by a smooth partition of unity."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from pinnbench import DTYPE
from pinnbench.errors import ContractError
from pinnbench.network.mlp import NetworkSpec, init_params


@dataclass(frozen=True)
class FBPINNSpec:
    lo: tuple[float, ...]
    hi: tuple[float, ...]
    subdomains: tuple[int, ...]
    overlap: float = 0.6
    subnet_hidden: tuple[int, ...] = (30,) * 3
    activation: str = "tanh"
    output_dim: int = 1
    window: str = "cosine"

    def __post_init__(self):
        if not (len(self.lo) == len(self.hi) == len(self.subdomains)):
            raise ContractError("lo, hi and subdomains must have one entry per axis")
        if any(n < 1 for n in self.subdomains):
            raise ContractError("subdomain counts must be >= 1")
        if not 0.0 < self.overlap < 1.0:
            raise ContractError("overlap ratio must lie in (0, 1)")
        if self.window != "cosine":
            raise ContractError(f"unknown window kind {self.window!r}")

    @property
    def dim(self):
        return len(self.lo)

    @property
    def n_subdomains(self):
        return math.prod(self.subdomains)

    def subnet_spec(self):
        return NetworkSpec(self.dim, self.output_dim, self.subnet_hidden, self.activation)

    def cells(self):
        """Multi-indices of subdomains in row-major order."""
        return list(itertools.product(*[range(n) for n in self.subdomains]))

    def box(self, j):
        """Support box of subdomain ``j``; this box is mapped onto [-1, 1]^d."""
        lo, hi = [], []
        for axis, k in enumerate(self.cells()[j]):
            a, b, n = self.lo[axis], self.hi[axis], self.subdomains[axis]
            w = (b - a) / n
            delta = self.overlap * w / 2.0
            lo.append(a if k == 0 else a + k * w - delta)
            hi.append(b if k == n - 1 else a + (k + 1) * w + delta)
        return np.array(lo), np.array(hi)


def _ramp(s, xp):
    # raised cosine from 0 at s<=0 to 1 at s>=1
    s = xp.clip(s, 0.0, 1.0)
    return 0.5 * (1.0 - xp.cos(math.pi * s))


def _raw_windows(fb: FBPINNSpec, X, xp):
    cols = []
    for cell in fb.cells():
        w = 1.0
        for axis, k in enumerate(cell):
            a, b, n = fb.lo[axis], fb.hi[axis], fb.subdomains[axis]
            if n == 1:
                continue
            width = (b - a) / n
            delta = fb.overlap * width / 2.0
            x = X[:, axis]
            if k > 0:
                left = a + k * width
                w = w * _ramp((x - (left - delta)) / (2 * delta), xp)
            if k < n - 1:
                right = a + (k + 1) * width
                w = w * (1.0 - _ramp((x - (right - delta)) / (2 * delta), xp))
        if isinstance(w, float):
            w = xp.ones_like(X[:, 0])
        cols.append(w)
    return xp.stack(cols, **({"axis": 1} if xp is np else {"dim": 1}))


def window_weights(fb: FBPINNSpec, X):
    """Normalized window weights, shape (N, n_subdomains). numpy or torch input."""
    xp = torch if isinstance(X, torch.Tensor) else np
    W = _raw_windows(fb, X, xp)
    total = W.sum(axis=1, keepdims=True) if xp is np else W.sum(dim=1, keepdim=True)
    return W / total


def window_weight(fb: FBPINNSpec, j, x):
    x = np.asarray(x, dtype=float).reshape(1, -1)
    return float(window_weights(fb, x)[0, j])


def normalize(fb: FBPINNSpec, j, X):
    lo, hi = fb.box(j)
    lo = torch.as_tensor(lo, dtype=DTYPE) if isinstance(X, torch.Tensor) else lo
    hi = torch.as_tensor(hi, dtype=DTYPE) if isinstance(X, torch.Tensor) else hi
    return 2.0 * (X - lo) / (hi - lo) - 1.0


class FBPINN(nn.Module):
    def __init__(self, spec: FBPINNSpec, subnets):
        super().__init__()
        if len(subnets) != spec.n_subdomains:
            raise ContractError("one subnetwork per subdomain is required")
        self.spec = spec
        self.subnets = nn.ModuleList(subnets)

    def forward(self, X):
        W = window_weights(self.spec, X)
        out = torch.zeros(X.shape[0], self.spec.output_dim, dtype=X.dtype)
        for j, net in enumerate(self.subnets):
            idx = torch.nonzero(W[:, j] > 0, as_tuple=True)[0]
            if idx.numel() == 0:
                continue
            xj = X.index_select(0, idx)
            contrib = W.index_select(0, idx)[:, j : j + 1] * net(normalize(self.spec, j, xj))
            out = out.index_add(0, idx, contrib)
        return out


def init_fbpinn(spec: FBPINNSpec, seed: int) -> FBPINN:
    sub = spec.subnet_spec()
    return FBPINN(spec, [init_params(sub, seed * 1009 + j) for j in range(spec.n_subdomains)])


def fbpinn_forward(model: FBPINN, x):
    X = torch.as_tensor(np.atleast_2d(x), dtype=DTYPE)
    return model(X)
