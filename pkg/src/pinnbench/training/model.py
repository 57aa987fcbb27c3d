"""Approximator assembly for a (case, method) pair."""

from __future__ import annotations

import torch
from torch import nn

from pinnbench.network.fbpinn import FBPINNSpec, init_fbpinn
from pinnbench.network.mlp import NetworkSpec, init_params
from pinnbench.pde.case import PDECase


def default_subdomains(dim):
    return (4,) * dim if dim <= 2 else (2,) * dim


class FieldModel(nn.Module):
    """Maps case coordinates to ``case.all_fields`` columns.

    Inverse cases carry a second network for the coefficient fields, fed with
    the spatial coordinates only.
    """

    def __init__(self, net, coef_net=None, n_spatial=None):
        super().__init__()
        self.net = net
        self.coef_net = coef_net
        self.n_spatial = n_spatial

    def forward(self, X):
        u = self.net(X)
        if self.coef_net is None:
            return u
        return torch.cat([u, self.coef_net(X[:, : self.n_spatial])], dim=1)


def build_model(case: PDECase, seed, hidden=(100,) * 5, adaptive="none", fbpinn=None, activation="tanh"):
    """``fbpinn`` is None for a plain MLP, else a dict of FBPINNSpec overrides."""
    if fbpinn is not None:
        lo, hi = case.geometry.bbox()
        opts = {"subdomains": default_subdomains(case.dim), **fbpinn}
        spec = FBPINNSpec(tuple(lo), tuple(hi), output_dim=len(case.fields), activation=activation, **opts)
        net = init_fbpinn(spec, seed)
    else:
        net = init_params(NetworkSpec(case.dim, len(case.fields), tuple(hidden), activation, adaptive), seed)
    coef = None
    if case.coefficients:
        coef_spec = NetworkSpec(case.spatial_dim, len(case.coefficients), tuple(hidden), activation)
        coef = init_params(coef_spec, seed + 7919)
    return FieldModel(net, coef, case.spatial_dim)
