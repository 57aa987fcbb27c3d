"""Gridded coefficient fields: file ingestion, bilinear lookup, fallback generator."""

from __future__ import annotations

import logging
import os
from pathlib import Path

import numpy as np
import torch

from pinnbench import DTYPE
from pinnbench.errors import ReferenceFormatError

log = logging.getLogger(__name__)


def data_dir():
    return Path(os.environ.get("BENCH_DATA_DIR", Path.cwd() / "data"))


class GridField:
    """Scalar field on a uniform 2-D grid, bilinear inside cells, clamped outside."""

    def __init__(self, xs, ys, values, source="file"):
        self.xs = np.asarray(xs, float)
        self.ys = np.asarray(ys, float)
        self.values = np.asarray(values, float).reshape(len(self.xs), len(self.ys))
        self.source = source
        self._v = torch.as_tensor(self.values, dtype=DTYPE)

    @property
    def reference_comparable(self):
        return self.source == "file"

    def __call__(self, x, y):
        """Differentiable lookup at torch coordinates ``x``, ``y``."""
        x0, y0 = self.xs[0], self.ys[0]
        dx = self.xs[1] - self.xs[0]
        dy = self.ys[1] - self.ys[0]
        nx, ny = len(self.xs), len(self.ys)
        fx = torch.clamp((x - x0) / dx, 0.0, nx - 1 - 1e-12)
        fy = torch.clamp((y - y0) / dy, 0.0, ny - 1 - 1e-12)
        i = torch.floor(fx).long().clamp(max=nx - 2)
        j = torch.floor(fy).long().clamp(max=ny - 2)
        s = fx - i
        t = fy - j
        v = self._v
        return (
            v[i, j] * (1 - s) * (1 - t)
            + v[i + 1, j] * s * (1 - t)
            + v[i, j + 1] * (1 - s) * t
            + v[i + 1, j + 1] * s * t
        )


def load_grid_field(path):
    """Read an ``x,y,<name>`` CSV on a full tensor-product grid."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if len(header) != 3:
            raise ReferenceFormatError(f"expected 3 columns x,y,value, got {header}", line=1)
        rows = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.strip().split(",")
            if len(parts) != 3:
                raise ReferenceFormatError("malformed row", line=lineno)
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                raise ReferenceFormatError("non-numeric value", line=lineno) from None
    arr = np.array(rows)
    xs = np.unique(arr[:, 0])
    ys = np.unique(arr[:, 1])
    if len(xs) * len(ys) != len(arr):
        raise ReferenceFormatError("coefficient file is not a full tensor-product grid")
    order = np.lexsort((arr[:, 1], arr[:, 0]))
    return GridField(xs, ys, arr[order, 2], source="file")


def gaussian_random_field(lo, hi, n, seed, length_scale=0.2, variance=1.0):
    """Squared-exponential GRF sample on an n x n grid over [lo, hi]^2."""
    xs = np.linspace(lo, hi, n)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    P = np.column_stack([X.ravel(), Y.ravel()])
    d2 = ((P[:, None, :] - P[None, :, :]) ** 2).sum(-1)
    K = variance * np.exp(-0.5 * d2 / length_scale**2)
    L = np.linalg.cholesky(K + 1e-8 * np.eye(len(P)))
    z = np.random.default_rng(seed).standard_normal(len(P))
    return xs, xs, (L @ z).reshape(n, n)


def coefficient_field(case_id, lo, hi, seed=0, positive=True, n=41):
    """File-backed field ``<BENCH_DATA_DIR>/<case_id>_coef.csv`` or a labelled fallback."""
    path = data_dir() / f"{case_id}_coef.csv"
    if path.exists():
        return load_grid_field(path)
    log.info("no coefficient file for %s; using fallback GRF (not comparable to published tables)", case_id)
    xs, ys, v = gaussian_random_field(lo, hi, n, seed)
    if positive:
        v = np.exp(v)
    return GridField(xs, ys, v, source="fallback-grf")
