"""Composite physics-informed loss: PDE, boundary/initial and data terms."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import torch

from pinnbench import DTYPE
from pinnbench.autodiff.derivs import compute_bundle
from pinnbench.errors import ContractError, Divergence
from pinnbench.pde.case import PDECase, residual
from pinnbench.pde.geometry import sample_boundary, sample_interior, tag_matches


@dataclass(frozen=True)
class LossWeights:
    """Weights on the PDE (w_c), boundary/initial (w_b) and data (w_d) terms.

    ``w_i`` overrides the weight of initial-condition terms (None: use w_b);
    ``per_term`` overrides single terms by name.
    """

    w_c: float = 1.0
    w_b: float = 1.0
    w_d: float = 1.0
    w_i: float | None = None
    per_term: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = [self.w_c, self.w_b, self.w_d, *self.per_term.values()]
        if self.w_i is not None:
            vals.append(self.w_i)
        if not all(np.isfinite(v) and v >= 0 for v in vals):
            raise ContractError("loss weights must be finite and nonnegative")

    def weight(self, name, group):
        if name in self.per_term:
            return self.per_term[name]
        if group == "pde":
            return self.w_c
        if group == "initial":
            return self.w_b if self.w_i is None else self.w_i
        if group == "data":
            return self.w_d
        return self.w_b

    def with_terms(self, updates):
        return LossWeights(self.w_c, self.w_b, self.w_d, self.w_i, {**self.per_term, **updates})


VANILLA = LossWeights()
PINN_W = LossWeights(1.0, 100.0, 100.0)


@dataclass
class LossBreakdown:
    terms: dict  # name -> scalar tensor (mean of squares)
    groups: dict  # name -> "pde" | "boundary" | "initial" | "data" | "gpinn"
    weights: dict  # name -> float
    total: torch.Tensor

    def values(self):
        return {k: float(v.detach()) for k, v in self.terms.items()}

    def names(self, group=None):
        return [k for k in self.terms if group is None or self.groups[k] == group]

    def term_gradient(self, name, params):
        """Parameter gradient of one unweighted term (flat tensor)."""
        gs = torch.autograd.grad(self.terms[name], params, retain_graph=True, allow_unused=True)
        return torch.cat([(torch.zeros_like(p) if g is None else g).reshape(-1) for g, p in zip(gs, params)])


@dataclass
class BoundarySet:
    X: torch.Tensor
    normals: torch.Tensor | None = None
    partner: torch.Tensor | None = None  # periodic: matching points on the opposite face


@dataclass
class PointSets:
    interior: torch.Tensor
    boundary: dict  # spec name -> BoundarySet
    data: tuple | None = None  # (X, values) with values (N, n_fields)

    def counts(self):
        out = {"interior": len(self.interior)}
        out.update({k: len(v.X) for k, v in self.boundary.items()})
        if self.data is not None:
            out["data"] = len(self.data[0])
        return out


def _t(a):
    return torch.as_tensor(np.asarray(a, dtype=float), dtype=DTYPE)


def boundary_sets(case: PDECase, P, N, T):
    """Split sampled boundary points over the case's boundary specs."""
    lo, hi = case.geometry.bbox()
    out = {}
    for spec in case.boundary:
        if spec.anchors is not None:
            A = np.array(spec.anchors, float)
            out[spec.name] = BoundarySet(_t(A), _t(np.zeros_like(A)))
            continue
        if spec.group == "initial":
            mask = T == "initial"
        else:
            mask = tag_matches(T, spec.selector) & (T != "initial")
        if not mask.any():
            raise ContractError(f"no boundary points sampled for {case.id}:{spec.name}")
        Xb, Nb = P[mask], N[mask]
        partner = None
        if spec.kind == "periodic":
            Q = Xb.copy()
            Q[:, spec.axis] = hi[spec.axis]
            Xb = Xb.copy()
            Xb[:, spec.axis] = lo[spec.axis]
            partner = _t(Q)
        out[spec.name] = BoundarySet(_t(Xb), _t(Nb), partner)
    return out


def sample_points(case: PDECase, n_interior, n_boundary, seed, strategy="pseudo", data=None):
    X = sample_interior(case.geometry, n_interior, seed, strategy)
    P, N, T = sample_boundary(case.geometry, n_boundary, seed + 1)
    if data is not None:
        data = (_t(data[0]), _t(data[1]))
    return PointSets(_t(X), boundary_sets(case, P, N, T), data)


def _field_cols(case, fields):
    names = case.all_fields
    return [names.index(f) for f in fields]


def boundary_residual(case: PDECase, model, spec, bset: BoundarySet):
    """Pointwise residual (N, len(fields)) of one boundary/initial condition."""
    cols = _field_cols(case, spec.fields)
    if spec.kind == "periodic":
        return model(bset.X)[:, cols] - model(bset.partner)[:, cols]
    g = spec.target_values(bset.X)
    if spec.kind == "dirichlet":
        return model(bset.X)[:, cols] - g
    X = bset.X.detach().requires_grad_(True)
    U = model(X)
    dn = []
    for c in cols:
        (grad,) = torch.autograd.grad(U[:, c].sum(), X, create_graph=True)
        dn.append((grad * bset.normals).sum(dim=1))
    dn = torch.stack(dn, dim=1)
    if spec.kind == "neumann":
        return dn - g
    c, q = spec.robin
    return c * dn + q * U[:, cols] - g


def pde_residual(case: PDECase, model, X, extra=()):
    bundle = compute_bundle(model, X, case.all_fields, case.coords, tuple(case.derivatives) + tuple(extra))
    return residual(case, bundle), bundle.X


def _check(name, value, iteration):
    if not torch.isfinite(value).all():
        raise Divergence(f"non-finite {name}", iteration=iteration)


def chunked(points: PointSets, size):
    """Split the interior set into chunks; boundary and data ride with the first.

    Yields (sub point set, fraction of the interior it holds) so that PDE
    terms scaled by the fraction sum to the full-set means.
    """
    n = len(points.interior)
    for j, start in enumerate(range(0, n, size)):
        first = j == 0
        sub = PointSets(points.interior[start : start + size], points.boundary if first else {},
                        points.data if first else None)
        yield sub, len(sub.interior) / n


def assemble_loss(case: PDECase, model, points: PointSets, weights=VANILLA, gpinn_weight=0.0, iteration=None,
                  pde_terms=None, pde_scale=1.0):
    """Weighted sum of mean-squared residual terms.

    ``pde_terms`` replaces the strong-form PDE terms (used by the variational
    loss, which keeps the boundary and data terms unchanged). ``pde_scale``
    multiplies the interior terms of a chunk; boundary conditions missing from
    ``points.boundary`` are skipped.
    """
    if len(points.interior) == 0 and pde_terms is None:
        raise ContractError("interior point set is empty")
    terms, groups = {}, {}
    if pde_terms is None:
        R, Xg = pde_residual(case, model, points.interior)
        _check("PDE residual", R, iteration)
        for k in range(R.shape[1]):
            terms[f"pde[{k}]"] = pde_scale * (R[:, k] ** 2).mean()
            groups[f"pde[{k}]"] = "pde"
        if gpinn_weight > 0:
            for i, c in enumerate(case.spatial_coords()):
                acc = 0.0
                for k in range(R.shape[1]):
                    (g,) = torch.autograd.grad(R[:, k].sum(), Xg, create_graph=True)
                    acc = acc + (g[:, i] ** 2).mean()
                terms[f"gpinn[{c}]"] = pde_scale * acc
                groups[f"gpinn[{c}]"] = "gpinn"
    else:
        for name, value in pde_terms.items():
            terms[name] = value
            groups[name] = "pde"
    for spec in case.boundary:
        if spec.name not in points.boundary:
            continue
        r = boundary_residual(case, model, spec, points.boundary[spec.name])
        _check(f"boundary residual {spec.name}", r, iteration)
        terms[spec.name] = (r**2).mean()
        groups[spec.name] = spec.group
    if points.data is not None:
        Xd, Yd = points.data
        r = model(Xd)[:, : Yd.shape[1]] - Yd
        _check("data residual", r, iteration)
        terms["data"] = (r**2).mean()
        groups["data"] = "data"
    w = {}
    for name in terms:
        w[name] = gpinn_weight if groups[name] == "gpinn" else weights.weight(name, groups[name])
    total = sum(w[n] * terms[n] for n in terms)
    _check("loss", total, iteration)
    return LossBreakdown(terms, groups, w, total)
