"""Variational (hp-VPINN style) PDE loss on box domains.

The box is cut into ``n_grid`` cells per axis (time counts as an axis). On each
cell the strong residual is tested against tensor-product Legendre
polynomials and integrated with Gauss-Legendre quadrature.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import torch
from numpy.polynomial import legendre

from pinnbench import DTYPE
from pinnbench.errors import ContractError, UnsupportedCase
from pinnbench.pde.geometry import Box, SpaceTime
from pinnbench.training.losses import VANILLA, assemble_loss, pde_residual


@dataclass(frozen=True)
class VPINNConfig:
    Q: int = 10
    n_grid: int = 8
    degree: int = 5

    def __post_init__(self):
        if self.Q < 1 or self.n_grid < 1 or self.degree < 0:
            raise ContractError("VPINN needs Q >= 1, n_grid >= 1, degree >= 0")

    @classmethod
    def for_dim(cls, dim):
        return cls() if dim <= 2 else cls(Q=5, n_grid=4, degree=3)


def gauss_legendre(Q, a=-1.0, b=1.0):
    """Q-point rule on [a, b]; exact for polynomials of degree <= 2Q - 1."""
    x, w = legendre.leggauss(Q)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def legendre_values(xi, degree):
    """P_0..P_degree at reference coordinates xi, shape (len(xi), degree + 1)."""
    return legendre.legvander(np.asarray(xi, float), degree)


def is_box_case(case):
    g = case.geometry
    if isinstance(g, SpaceTime):
        return isinstance(g.space, Box)
    return isinstance(g, Box)


@dataclass
class CellQuadrature:
    points: torch.Tensor  # (n_cells * Q^d, d), cell-major
    weights: torch.Tensor  # (Q^d,), includes the cell Jacobian
    tests: torch.Tensor  # (Q^d, n_tests)
    n_cells: int


def cell_quadrature(lo, hi, cfg: VPINNConfig):
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    d = len(lo)
    xi, wq = legendre.leggauss(cfg.Q)
    ref = np.array(list(itertools.product(xi, repeat=d)))
    wref = np.prod(np.array(list(itertools.product(wq, repeat=d))), axis=1)
    P = legendre_values(xi, cfg.degree)
    # tensor-product test functions evaluated at the tensor-product nodes
    idx = np.array(list(itertools.product(range(cfg.Q), repeat=d)))
    degs = list(itertools.product(range(cfg.degree + 1), repeat=d))
    V = np.stack([np.prod([P[idx[:, a], k[a]] for a in range(d)], axis=0) for k in degs], axis=1)
    h = (hi - lo) / cfg.n_grid
    jac = np.prod(h / 2.0)
    pts = []
    for cell in itertools.product(range(cfg.n_grid), repeat=d):
        c_lo = lo + np.array(cell) * h
        pts.append(c_lo + (ref + 1.0) * h / 2.0)
    return CellQuadrature(
        torch.as_tensor(np.concatenate(pts), dtype=DTYPE),
        torch.as_tensor(wref * jac, dtype=DTYPE),
        torch.as_tensor(V, dtype=DTYPE),
        cfg.n_grid**d,
    )


def tested_residuals(R, quad: CellQuadrature):
    """R_{cell, test, eq} = sum_q w_q r_q v_test(q) for residual values R (N, n_eq)."""
    Rc = R.reshape(quad.n_cells, -1, R.shape[1])
    return torch.einsum("cqe,q,qt->cte", Rc, quad.weights, quad.tests)


def vpinn_terms(case, model, quad: CellQuadrature):
    """Variational PDE terms, one per equation: sum over cells and tests of R_k^2."""
    if not is_box_case(case):
        raise UnsupportedCase(f"{case.id}: variational loss needs a box domain")
    R, _ = pde_residual(case, model, quad.points)
    Rk = tested_residuals(R, quad)
    return {f"vpinn[{e}]": (Rk[:, :, e] ** 2).sum() for e in range(R.shape[1])}


def vpinn_loss(case, model, cfg: VPINNConfig, points, weights=None, iteration=None):
    lo, hi = case.geometry.bbox()
    quad = cell_quadrature(lo, hi, cfg)
    return assemble_loss(case, model, points, weights or VANILLA, iteration=iteration,
                         pde_terms=vpinn_terms(case, model, quad))
