"""Residual-based adaptive refinement of the collocation set."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from pinnbench import DTYPE
from pinnbench.errors import ContractError
from pinnbench.pde.geometry import sample_interior
from pinnbench.training.losses import pde_residual


@dataclass(frozen=True)
class RARPolicy:
    period: int = 2000
    pool: int = 81920
    add: int = 82

    def __post_init__(self):
        if self.period < 1 or self.add < 1 or self.pool < 1:
            raise ContractError("RAR period, pool and additions must be >= 1")

    @classmethod
    def for_batch(cls, n_interior, period=2000):
        # pool of 10x the batch, 1% of the batch added per refinement
        return cls(period, 10 * n_interior, max(1, n_interior // 100))


def top_k(magnitudes, k):
    """Indices of the k largest entries, largest first, ties by index."""
    mags = np.asarray(magnitudes)
    order = np.lexsort((np.arange(len(mags)), -mags))
    return order[: min(k, len(mags))]


def residual_magnitude(case, model, X, chunk=8192):
    out = []
    for i in range(0, len(X), chunk):
        R, _ = pde_residual(case, model, X[i : i + chunk])
        out.append(torch.linalg.vector_norm(R.detach(), dim=1))
    return torch.cat(out).numpy()


def rar_refine(interior, case, model, policy: RARPolicy, seed):
    """Append the ``policy.add`` highest-residual candidates; never removes points."""
    cand = torch.as_tensor(sample_interior(case.geometry, policy.pool, seed), dtype=DTYPE)
    mags = residual_magnitude(case, model, cand)
    idx = torch.as_tensor(top_k(mags, policy.add))
    return torch.cat([interior, cand[idx]], dim=0)
