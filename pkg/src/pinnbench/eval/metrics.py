"""Error metrics between predictions and reference values."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import torch

from pinnbench import DTYPE
from pinnbench.errors import ContractError, UndefinedMetricError

log = logging.getLogger(__name__)

BANDS = ("low", "mid", "high")
DEFAULT_SLICES = 10


def _pair(pred, truth):
    p = np.asarray(pred, dtype=float).reshape(-1)
    t = np.asarray(truth, dtype=float).reshape(-1)
    if p.shape != t.shape:
        raise ContractError(f"prediction length {p.size} != truth length {t.size}")
    if p.size < 1:
        raise ContractError("metrics need at least one value")
    return p, t


def l2re(pred, truth):
    p, t = _pair(pred, truth)
    den = float(np.sum(t * t))
    if den == 0.0:
        raise UndefinedMetricError("L2RE undefined: reference is identically zero")
    return float(np.sqrt(np.sum((p - t) ** 2) / den))


def l1re(pred, truth):
    p, t = _pair(pred, truth)
    den = float(np.sum(np.abs(t)))
    if den == 0.0:
        raise UndefinedMetricError("L1RE undefined: reference is identically zero")
    return float(np.sum(np.abs(p - t)) / den)


def mse(pred, truth):
    p, t = _pair(pred, truth)
    return float(np.mean((p - t) ** 2))


def max_err(pred, truth):
    p, t = _pair(pred, truth)
    return float(np.max(np.abs(p - t)))


# --- spectral error ----------------------------------------------------------


def default_bands(n):
    """Integer |k| ranges (inclusive) for an n-point axis."""
    return {
        "low": (0, n // 8 - 1),
        "mid": (n // 8, n // 4 - 1),
        "high": (n // 4, n // 2),
    }


def radial_wavenumbers(shape):
    """Integer radial |k| for every entry of an unshifted n-D DFT."""
    ks = np.meshgrid(*[np.fft.fftfreq(n) * n for n in shape], indexing="ij")
    return np.rint(np.sqrt(sum(k * k for k in ks))).astype(int)


def spectral_energy(diff):
    """|F(diff)|^2 summed over leading field axes; diff has shape (fields, *grid)."""
    F = np.fft.fftn(diff, axes=tuple(range(1, diff.ndim)))
    return np.sum(np.abs(F) ** 2, axis=0)


def fmse(pred, truth, band="low", bands=None, stacked=False):
    """Band-averaged spectral error on a uniform grid.

    ``pred`` and ``truth`` are one field on the grid, or with ``stacked`` a
    (fields, *grid) array whose spectral energies are summed. ``band`` is a
    band name or an explicit inclusive (kmin, kmax) pair. The high band also
    collects radial wavenumbers beyond its nominal upper edge.
    """
    p = np.asarray(pred, float)
    t = np.asarray(truth, float)
    if p.shape != t.shape:
        raise ContractError("fmse needs predictions and truth on the same grid")
    if not stacked:
        p, t = p[None], t[None]
    E = spectral_energy(p - t)
    K = radial_wavenumbers(E.shape)
    n = min(E.shape)
    if isinstance(band, str):
        kmin, kmax = (bands or default_bands(n))[band]
        mask = (K >= kmin) & ((K <= kmax) if band != "high" else True)
    else:
        kmin, kmax = band
        mask = (K >= kmin) & (K <= kmax)
    if kmax < kmin:
        raise ContractError(f"empty band [{kmin}, {kmax}]")
    return float(np.sqrt(E[mask].sum()) / (kmax - kmin + 1))


def band_widths(n):
    return {b: hi - lo + 1 for b, (lo, hi) in default_bands(n).items()}


# --- grids -------------------------------------------------------------------


def grid_layout(points, tol=1e-9):
    """Axis values and lexicographic order if ``points`` form a uniform tensor grid, else None."""
    P = np.asarray(points, float)
    axes = []
    for j in range(P.shape[1]):
        u = np.unique(np.round(P[:, j], 12))
        if len(u) > 1:
            d = np.diff(u)
            if np.max(np.abs(d - d[0])) > tol * max(1.0, abs(d[0])) * 1e3:
                return None
        axes.append(u)
    if int(np.prod([len(a) for a in axes])) != len(P):
        return None
    order = np.lexsort(tuple(P[:, j] for j in reversed(range(P.shape[1]))))
    return axes, order


def grid_fmse(points, pred, truth, n_space, time_dependent):
    """fMSE per band over the spatial grid; averaged over time slices. None off-grid."""
    lay = grid_layout(points)
    if lay is None:
        return None
    axes, order = lay
    shape = [len(a) for a in axes]
    nf = pred.shape[1]
    Pg = pred[order].reshape(*shape, nf)
    Tg = truth[order].reshape(*shape, nf)
    Pg = np.moveaxis(Pg, -1, 0)
    Tg = np.moveaxis(Tg, -1, 0)
    if min(shape[:n_space]) < 8:
        return None
    out = {}
    for b in BANDS:
        if time_dependent:
            vals = [fmse(Pg[..., i], Tg[..., i], b, stacked=True) for i in range(shape[-1])]
            out[b] = float(np.mean(vals))
        else:
            out[b] = fmse(Pg, Tg, b, stacked=True)
    return out


# --- reports -----------------------------------------------------------------


@dataclass
class MetricReport:
    l2re: float
    l1re: float
    mse: float
    max_err: float
    fmse: dict | None
    n_test: int

    def as_dict(self):
        d = {"l2re": self.l2re, "l1re": self.l1re, "mse": self.mse, "max_err": self.max_err, "n_test": self.n_test}
        for b in BANDS:
            d[f"fmse_{b}"] = None if self.fmse is None else self.fmse[b]
        return d


@dataclass
class TemporalReport:
    centers: np.ndarray
    l2re: np.ndarray


def temporal_l2re(pred, truth, t, n_slices=DEFAULT_SLICES, t_range=None):
    """L2RE per equal-width time bin; empty bins are dropped."""
    pred = np.asarray(pred, float).reshape(len(t), -1)
    truth = np.asarray(truth, float).reshape(len(t), -1)
    t = np.asarray(t, float)
    lo, hi = t_range if t_range is not None else (t.min(), t.max())
    edges = np.linspace(lo, hi, n_slices + 1)
    which = np.clip(np.searchsorted(edges, t, side="right") - 1, 0, n_slices - 1)
    centers, vals = [], []
    for b in range(n_slices):
        m = which == b
        if not m.any():
            log.info("time bin %d is empty; dropped", b)
            continue
        centers.append(0.5 * (edges[b] + edges[b + 1]))
        vals.append(l2re(pred[m], truth[m]))
    return TemporalReport(np.array(centers), np.array(vals))


def predict(model, X, columns, chunk=32768):
    X = np.asarray(X, float)
    out = []
    with torch.no_grad():
        for i in range(0, len(X), chunk):
            y = model(torch.as_tensor(X[i : i + chunk], dtype=DTYPE))
            out.append(y[:, columns].numpy())
    return np.concatenate(out)


def report(pred, truth, points=None, n_space=None, time_dependent=False):
    pred = np.asarray(pred, float).reshape(len(truth), -1)
    truth = np.asarray(truth, float).reshape(len(truth), -1)
    fm = None
    if points is not None and n_space:
        fm = grid_fmse(points, pred, truth, n_space, time_dependent)
    return MetricReport(l2re(pred, truth), l1re(pred, truth), mse(pred, truth), max_err(pred, truth), fm, len(truth))


def evaluate(case, model, reference):
    """Forward the model on all reference points and compute every applicable metric.

    Reference columns select the model outputs, so a coefficient reference
    scores the coefficient network of an inverse case.
    """
    if reference.points.shape[1] != case.dim:
        raise ContractError(f"reference has {reference.points.shape[1]} coordinates; {case.id} has {case.dim}")
    try:
        cols = [case.all_fields.index(c) for c in reference.columns]
    except ValueError:
        raise ContractError(f"reference columns {reference.columns} not among {case.all_fields}") from None
    pred = predict(model, reference.points, cols)
    return report(pred, reference.values, reference.points, case.spatial_dim, case.time_dependent)
