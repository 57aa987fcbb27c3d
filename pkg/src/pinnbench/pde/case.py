from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import torch

from pinnbench import DTYPE
from pinnbench.autodiff.derivs import DerivativeBundle, compute_bundle
from pinnbench.errors import ContractError
from pinnbench.pde.geometry import Geometry, SpaceTime

BOUNDARY_KINDS = ("dirichlet", "neumann", "robin", "periodic")
CHALLENGES = ("complex geometry", "multi-scale", "nonlinearity", "high dim")


@dataclass(frozen=True)
class BoundarySpec:
    """One soft boundary/initial constraint.

    ``target`` maps an (N, d) tensor to (N,) or (N, len(fields)); a number is
    broadcast. Robin reads ``c * n.grad(u) = g - q * u`` with ``robin=(c, q)``.
    ``anchors`` pins the constraint to fixed points instead of sampled ones.
    """

    name: str
    selector: tuple[str, ...] | str
    kind: str
    target: Callable | float = 0.0
    fields: tuple[str, ...] = ("u",)
    robin: tuple[float, float] | None = None
    group: str = "boundary"
    axis: int | None = None
    anchors: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self):
        if self.kind not in BOUNDARY_KINDS:
            raise ContractError(f"unknown boundary kind {self.kind!r}")
        if (self.kind == "robin") != (self.robin is not None):
            raise ContractError("robin coefficients are required for, and only for, robin conditions")
        if self.kind == "periodic" and self.axis is None:
            raise ContractError("periodic conditions need an axis")
        if self.group not in ("boundary", "initial"):
            raise ContractError("group must be 'boundary' or 'initial'")

    def needs_gradient(self):
        return self.kind in ("neumann", "robin")

    def target_values(self, X):
        n = X.shape[0]
        if callable(self.target):
            g = self.target(X)
        else:
            g = torch.full((n,), float(self.target), dtype=DTYPE)
        if g.ndim == 1:
            g = g[:, None]
        if g.shape[1] == 1 and len(self.fields) > 1:
            g = g.expand(n, len(self.fields))
        return g


@dataclass(frozen=True)
class InverseSpec:
    n_obs: int = 2500
    noise: float = 0.1
    layout: str = "grid"  # "grid": sqrt(n) x sqrt(n) over the spatial box; "random": uniform in space-time


@dataclass(frozen=True)
class PDECase:
    id: str
    title: str
    space: Geometry
    time: tuple[float, float] | None
    coords: tuple[str, ...]
    fields: tuple[str, ...]
    n_equations: int
    derivatives: tuple[tuple[str, tuple[str, ...]], ...]
    residual_fn: Callable
    boundary: tuple[BoundarySpec, ...]
    params: dict
    solution: Callable | None = None
    coefficients: tuple[str, ...] = ()
    coefficient_solution: Callable | None = None
    inverse: InverseSpec | None = None
    tags: frozenset = frozenset()
    declared: tuple[str, ...] = ()
    reference_file: str | None = None
    notes: tuple[str, ...] = ()
    data_sources: dict = field(default_factory=dict)

    @property
    def geometry(self):
        if self.time is None:
            return self.space
        return SpaceTime(self.space, *self.time)

    @property
    def dim(self):
        return len(self.coords)

    @property
    def spatial_dim(self):
        return self.space.dim

    @property
    def time_dependent(self):
        return self.time is not None

    @property
    def all_fields(self):
        return self.fields + self.coefficients

    @property
    def has_analytic(self):
        return self.solution is not None

    @property
    def large_batch(self):
        # input dimension (space + time) of three or more uses the larger point budget
        return self.dim >= 3

    def spatial_coords(self):
        return self.coords[: self.spatial_dim]


def residual(case: PDECase, bundle: DerivativeBundle):
    """Pointwise strong-form residual, shape (N, n_equations)."""
    for f, path in case.derivatives:
        if (f, path) not in bundle:
            raise ContractError(f"bundle lacks derivative {path} of {f} required by {case.id}")
    r = case.residual_fn(bundle.X, bundle)
    if r.ndim == 1:
        r = r[:, None]
    if r.shape[1] != case.n_equations:
        raise ContractError(f"{case.id} residual has {r.shape[1]} equations, expected {case.n_equations}")
    return r


def solution_fn(case: PDECase):
    """Torch callable evaluating the closed-form fields (plus coefficients)."""
    if case.solution is None:
        raise ContractError(f"{case.id} has no analytic solution")

    def fn(X):
        u = case.solution(X)
        if u.ndim == 1:
            u = u[:, None]
        if case.coefficients:
            a = case.coefficient_solution(X)
            if a.ndim == 1:
                a = a[:, None]
            u = torch.cat([u, a], dim=1)
        return u

    return fn


def analytic(case: PDECase, X):
    """Closed-form field values at points ``X`` (numpy), shape (N, n_fields)."""
    fn = solution_fn(case)
    with torch.no_grad():
        out = fn(torch.as_tensor(np.atleast_2d(X), dtype=DTYPE))
    return out[:, : len(case.fields)].numpy()


def analytic_coefficient(case: PDECase, X):
    if case.coefficient_solution is None:
        raise ContractError(f"{case.id} has no ground-truth coefficient field")
    with torch.no_grad():
        a = case.coefficient_solution(torch.as_tensor(np.atleast_2d(X), dtype=DTYPE))
    return (a[:, None] if a.ndim == 1 else a).numpy()


def bundle_for(case: PDECase, fn, X, extra=()):
    X = torch.as_tensor(X, dtype=DTYPE)
    return compute_bundle(fn, X, case.all_fields, case.coords, tuple(case.derivatives) + tuple(extra))


def truth_residual(case: PDECase, X):
    """Residual of the closed form, differentiated by the autodiff route."""
    b = bundle_for(case, solution_fn(case), X)
    return residual(case, b).detach().numpy()
