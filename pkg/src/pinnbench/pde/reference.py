"""Reference solutions: CSV ingestion, synthesized grids, inverse-problem data."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import torch

from pinnbench import DTYPE
from pinnbench.errors import ContractError, ReferenceFormatError
from pinnbench.pde.case import PDECase, analytic
from pinnbench.pde.coeffs import data_dir
from pinnbench.pde.geometry import SpaceTime

log = logging.getLogger(__name__)

GRID_LOW_DIM = 100
GRID_TIME_SLICES = 20
GRID_HIGH_DIM = 20
GRID_MAX_POINTS = 1_000_000


@dataclass
class ReferenceSolution:
    points: np.ndarray  # (N, dim), time last
    values: np.ndarray  # (N, n_unknowns)
    columns: tuple[str, ...]
    source: str  # "analytic" | "file" | "quadrature"

    def __post_init__(self):
        if len(self.points) < 1:
            raise ContractError("a reference needs at least one point")
        if len(self.points) != len(self.values):
            raise ContractError("points and values differ in length")

    @property
    def n(self):
        return len(self.points)


def _parse_float(tok, lineno):
    try:
        return float(tok)
    except ValueError:
        raise ReferenceFormatError(f"non-numeric value {tok!r}", line=lineno) from None


def load_reference(path, case: PDECase | None = None, scale=1.0):
    """Read a comma-delimited reference file.

    With ``case`` given, the header must name exactly the case coordinates
    followed by its unknowns (forward fields plus any coefficient fields).
    ``scale`` multiplies the coordinates, used by geometrically scaled families.
    """
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ReferenceFormatError("empty reference file", line=1)
    header = tuple(h.strip() for h in lines[0].split(","))
    if case is not None:
        expected = case.coords + case.fields
        with_coef = expected + case.coefficients
        if header not in (expected, with_coef):
            raise ReferenceFormatError(
                f"header {','.join(header)} does not match {case.id} ({','.join(expected)}): dimension mismatch",
                line=1,
            )
        n_coord = case.dim
    else:
        n_coord = len(header) - 1
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        toks = line.split(",")
        if len(toks) != len(header):
            raise ReferenceFormatError(f"expected {len(header)} columns, got {len(toks)}", line=lineno)
        rows.append([_parse_float(t, lineno) for t in toks])
    if not rows:
        raise ReferenceFormatError("no data rows", line=2)
    arr = np.array(rows)
    return ReferenceSolution(arr[:, :n_coord] * scale, arr[:, n_coord:], header[n_coord:], "file")


def write_reference(path, columns, points, values):
    arr = np.column_stack([points, values])
    np.savetxt(path, arr, delimiter=",", header=",".join(columns), comments="", fmt="%.17g")


def reference_grid(case: PDECase):
    """The documented evaluation grid restricted to the domain closure.

    Spatial dimension <= 2: 100 points per spatial axis; >= 3: 20 per axis.
    Time-dependent cases add 20 evenly spaced time slices. Grids larger than
    ``GRID_MAX_POINTS`` are thinned by a fixed-seed subsample.
    """
    geom = case.space
    lo, hi = geom.bbox()
    d = geom.dim
    per_axis = GRID_LOW_DIM if d <= 2 else GRID_HIGH_DIM
    axes = [np.linspace(lo[i], hi[i], per_axis) for i in range(d)]
    mesh = np.meshgrid(*axes, indexing="ij")
    P = np.column_stack([m.ravel() for m in mesh])
    P = P[geom.contains(P)]
    if case.time is not None:
        ts = np.linspace(case.time[0], case.time[1], GRID_TIME_SLICES)
        P = np.column_stack([np.repeat(P, len(ts), axis=0), np.tile(ts, len(P))])
    if len(P) > GRID_MAX_POINTS:
        keep = np.sort(np.random.default_rng(0).choice(len(P), GRID_MAX_POINTS, replace=False))
        P = P[keep]
    return P


def _evaluate_chunked(fn, P, chunk=65536):
    out = [np.asarray(fn(P[i : i + chunk])) for i in range(0, len(P), chunk)]
    return np.concatenate(out)


def reference_for(case: PDECase):
    """File reference if present, else a synthesized one; None if neither exists."""
    if case.reference_file:
        path = data_dir() / case.reference_file
        if path.exists():
            return load_reference(path, case, scale=case.data_sources.get("reference_scale", 1.0))
    if case.has_analytic:
        P = reference_grid(case)
        return ReferenceSolution(P, _evaluate_chunked(lambda X: analytic(case, X), P), case.fields, "analytic")
    fn = case.data_sources.get("reference_fn")
    if fn is not None:
        P = reference_grid(case)
        vals = _evaluate_chunked(fn, P)
        return ReferenceSolution(P, vals.reshape(len(P), -1), case.fields, "quadrature")
    log.warning("no reference for %s (expected %s)", case.id, case.reference_file)
    return None


def coefficient_reference(case: PDECase):
    """Ground-truth coefficient on the reference grid (inverse cases)."""
    if case.coefficient_solution is None:
        raise ContractError(f"{case.id} has no ground-truth coefficient")
    P = reference_grid(case)
    with torch.no_grad():
        a = case.coefficient_solution(torch.as_tensor(P, dtype=DTYPE))
    return ReferenceSolution(P, a.reshape(len(P), -1).numpy(), case.coefficients, "analytic")


def observed_data(case: PDECase, seed, noise=None):
    """Noisy state observations for an inverse case, deterministic per seed."""
    if case.inverse is None:
        raise ContractError(f"{case.id} is not an inverse problem")
    spec = case.inverse
    sigma = spec.noise if noise is None else noise
    rng = np.random.default_rng(seed)
    lo, hi = case.space.bbox()
    if spec.layout == "grid":
        m = int(round(np.sqrt(spec.n_obs)))
        if m * m != spec.n_obs:
            raise ContractError("grid layout needs a square observation count")
        g0 = np.linspace(lo[0], hi[0], m)
        g1 = np.linspace(lo[1], hi[1], m)
        X, Y = np.meshgrid(g0, g1, indexing="ij")
        P = np.column_stack([X.ravel(), Y.ravel()])
    else:
        geom = case.geometry
        blo, bhi = geom.bbox()
        P = blo + rng.random((spec.n_obs, len(blo))) * (bhi - blo)
        if isinstance(geom, SpaceTime) and not geom.space.is_box():
            raise ContractError("random observation layout needs a box domain")
    u = analytic(case, P)
    if sigma > 0:
        u = u + rng.normal(0.0, sigma, size=u.shape)
    return P, u
