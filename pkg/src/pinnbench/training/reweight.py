"""Adaptive loss weighting: learning-rate annealing (LRA) and NTK trace ratios."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import torch

from pinnbench.errors import ContractError
from pinnbench.training.losses import PointSets, boundary_residual, pde_residual


@dataclass
class ReweightPolicy:
    kind: str = "fixed"  # "fixed" | "lra" | "ntk"
    alpha: float = 0.1
    period: int = 1000
    weights: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("fixed", "lra", "ntk"):
            raise ContractError(f"unknown reweighting kind {self.kind!r}")
        if not 0.0 < self.alpha <= 1.0:
            raise ContractError("alpha must lie in (0, 1]")
        if self.period < 1:
            raise ContractError("period must be >= 1")

    def due(self, iteration):
        return self.kind != "fixed" and iteration % self.period == 0


def lra_update(pde_grad, term_grads, weights, alpha=0.1):
    """w_k <- (1 - alpha) w_k + alpha * max|grad L_pde| / mean|grad L_k|."""
    top = float(torch.abs(pde_grad).max())
    if top == 0.0:
        raise ContractError("PDE gradient vanishes; LRA ratio undefined")
    out = dict(weights)
    for name, g in term_grads.items():
        mean = float(torch.abs(g).mean())
        if mean == 0.0:
            continue
        out[name] = (1 - alpha) * weights.get(name, 1.0) + alpha * top / mean
    return out


def ntk_weights(traces, previous=None):
    """w_k = (sum_j trace_j) / trace_k; terms with zero trace keep their weight."""
    previous = previous or {}
    total = sum(traces.values())
    out = {}
    for name, tr in traces.items():
        out[name] = total / tr if tr > 0 else previous.get(name, 1.0)
    return out


def per_point_trace(r, params):
    """Sum over points of the squared parameter-gradient norm of r_i."""
    acc = 0.0
    for i in range(r.shape[0]):
        gs = torch.autograd.grad(r[i], params, retain_graph=True, allow_unused=True)
        acc += sum(float((g * g).sum()) for g in gs if g is not None)
    return acc


def _subsample(X, n, rng):
    if len(X) <= n:
        return np.arange(len(X))
    return np.sort(rng.choice(len(X), n, replace=False))


def term_traces(case, model, points: PointSets, n_sub=32, seed=0):
    """Estimated NTK block traces per loss term from a point subsample.

    Each estimate is rescaled by N_k / n_sub so terms with different point
    counts stay comparable to the full-set sum.
    """
    rng = np.random.default_rng(seed)
    params = [p for p in model.parameters() if p.requires_grad]
    traces = {}
    idx = _subsample(points.interior, n_sub, rng)
    R, _ = pde_residual(case, model, points.interior[idx])
    scale = len(points.interior) / len(idx)
    for k in range(R.shape[1]):
        traces[f"pde[{k}]"] = scale * per_point_trace(R[:, k], params)
    for spec in case.boundary:
        b = points.boundary[spec.name]
        j = _subsample(b.X, n_sub, rng)
        sub = type(b)(b.X[j], None if b.normals is None else b.normals[j], None if b.partner is None else b.partner[j])
        r = boundary_residual(case, model, spec, sub)
        traces[spec.name] = len(b.X) / len(j) * per_point_trace(r.reshape(-1), params)
    if points.data is not None:
        Xd, Yd = points.data
        j = _subsample(Xd, n_sub, rng)
        r = model(Xd[j])[:, : Yd.shape[1]] - Yd[j]
        traces["data"] = len(Xd) / len(j) * per_point_trace(r.reshape(-1), params)
    return traces


def ntk_update(policy: ReweightPolicy, case, model, points, n_sub=32, seed=0):
    policy.weights = ntk_weights(term_traces(case, model, points, n_sub, seed), policy.weights)
    return policy.weights
