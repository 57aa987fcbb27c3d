"""Domains, membership tests and collocation/boundary samplers.

Boundary components carry string tags. Box faces are tagged
``"<name>.lo<axis>"`` / ``"<name>.hi<axis>"``, balls by their name; a selector
``"rect"`` matches ``"rect"`` and every ``"rect.*"`` tag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln
from scipy.stats import qmc

from pinnbench.errors import ContractError, GeometryError

EPS = 1e-12
MIN_ACCEPTANCE = 0.01


def tag_matches(tags, selector):
    tags = np.asarray(tags, dtype=object)
    if isinstance(selector, str):
        selector = (selector,)
    mask = np.zeros(len(tags), dtype=bool)
    for s in selector:
        mask |= np.array([t == s or t.startswith(s + ".") for t in tags], dtype=bool)
    return mask


def _unit(rng, n, d):
    v = rng.standard_normal((n, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


@dataclass(frozen=True)
class BoundaryPart:
    tag: str
    measure: float
    sampler: object  # (n, rng) -> (points, outward normals)


class Geometry:
    dim: int

    def bbox(self):
        raise NotImplementedError

    def inside(self, X, tol=0.0):
        """Points at least ``tol`` inside; negative tol admits the closure."""
        raise NotImplementedError

    def contains(self, X):
        return self.inside(np.atleast_2d(X), -1e-10)

    def boundary_parts(self):
        raise NotImplementedError

    def on_boundary(self, X, tol=1e-9):
        X = np.atleast_2d(X)
        return self.inside(X, -tol) & ~self.inside(X, tol)

    def volume(self):
        raise NotImplementedError

    def _direct_interior(self, n, rng):
        return None

    def is_box(self):
        return False


@dataclass(frozen=True)
class Box(Geometry):
    lo: tuple[float, ...]
    hi: tuple[float, ...]
    name: str = "box"

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or any(a >= b for a, b in zip(self.lo, self.hi)):
            raise ContractError("box needs lo < hi on every axis")

    @property
    def dim(self):
        return len(self.lo)

    def bbox(self):
        return np.array(self.lo, float), np.array(self.hi, float)

    def inside(self, X, tol=0.0):
        lo, hi = self.bbox()
        return np.all((X > lo + tol) & (X < hi - tol), axis=1) if tol >= 0 else np.all(
            (X >= lo + tol) & (X <= hi - tol), axis=1
        )

    def volume(self):
        lo, hi = self.bbox()
        return float(np.prod(hi - lo))

    def is_box(self):
        return True

    def _direct_interior(self, n, rng):
        lo, hi = self.bbox()
        return lo + rng.random((n, self.dim)) * (hi - lo)

    def boundary_parts(self):
        lo, hi = self.bbox()
        parts = []
        for axis in range(self.dim):
            others = [i for i in range(self.dim) if i != axis]
            measure = float(np.prod((hi - lo)[others])) if others else 1.0
            for side, value, sign in (("lo", lo[axis], -1.0), ("hi", hi[axis], 1.0)):

                def sampler(n, rng, axis=axis, value=value, sign=sign):
                    pts = lo + rng.random((n, self.dim)) * (hi - lo)
                    pts[:, axis] = value
                    normals = np.zeros((n, self.dim))
                    normals[:, axis] = sign
                    return pts, normals

                parts.append(BoundaryPart(f"{self.name}.{side}{axis}", measure, sampler))
        return parts


@dataclass(frozen=True)
class Ball(Geometry):
    center: tuple[float, ...]
    radius: float
    name: str = "ball"

    @property
    def dim(self):
        return len(self.center)

    def bbox(self):
        c = np.array(self.center, float)
        return c - self.radius, c + self.radius

    def inside(self, X, tol=0.0):
        r = np.linalg.norm(X - np.array(self.center), axis=1)
        return r < self.radius - tol if tol >= 0 else r <= self.radius - tol

    def volume(self):
        d = self.dim
        return float(math.exp(d / 2 * math.log(math.pi) - gammaln(d / 2 + 1)) * self.radius**d)

    def surface(self):
        d = self.dim
        return float(2 * math.exp(d / 2 * math.log(math.pi) - gammaln(d / 2)) * self.radius ** (d - 1))

    def _direct_interior(self, n, rng):
        d = self.dim
        r = self.radius * rng.random(n) ** (1.0 / d)
        return np.array(self.center) + _unit(rng, n, d) * r[:, None]

    def boundary_parts(self):
        c = np.array(self.center, float)

        def sampler(n, rng):
            u = _unit(rng, n, self.dim)
            return c + self.radius * u, u

        return [BoundaryPart(self.name, self.surface(), sampler)]


@dataclass(frozen=True)
class Difference(Geometry):
    """``base`` with the closed regions in ``removed`` cut out."""

    base: Geometry
    removed: tuple[Geometry, ...]

    @property
    def dim(self):
        return self.base.dim

    def bbox(self):
        return self.base.bbox()

    def inside(self, X, tol=0.0):
        mask = self.base.inside(X, tol)
        for r in self.removed:
            mask &= ~r.inside(X, -tol)
        return mask

    def volume(self):
        return None

    def _direct_interior(self, n, rng):
        return None

    def boundary_parts(self):
        parts = []
        for p in self.base.boundary_parts():
            parts.append(BoundaryPart(p.tag, p.measure, p.sampler))
        for r in self.removed:
            for p in r.boundary_parts():

                def flipped(n, rng, s=p.sampler):
                    pts, nrm = s(n, rng)
                    return pts, -nrm

                parts.append(BoundaryPart(p.tag, p.measure, flipped))
        return parts


@dataclass(frozen=True)
class Union(Geometry):
    parts: tuple[Geometry, ...]

    @property
    def dim(self):
        return self.parts[0].dim

    def bbox(self):
        los, his = zip(*(p.bbox() for p in self.parts))
        return np.min(los, axis=0), np.max(his, axis=0)

    def inside(self, X, tol=0.0):
        mask = np.zeros(len(X), dtype=bool)
        for p in self.parts:
            mask |= p.inside(X, tol)
        return mask

    def volume(self):
        return None

    def boundary_parts(self):
        return [bp for p in self.parts for bp in p.boundary_parts()]


@dataclass(frozen=True)
class SpaceTime:
    """Spatial domain times the interval [t0, t1]; time is the last coordinate."""

    space: Geometry
    t0: float
    t1: float

    @property
    def dim(self):
        return self.space.dim + 1

    def bbox(self):
        lo, hi = self.space.bbox()
        return np.append(lo, self.t0), np.append(hi, self.t1)

    def inside(self, X, tol=0.0):
        t = X[:, -1]
        tmask = (t > self.t0 + tol) & (t < self.t1 - tol) if tol >= 0 else (t >= self.t0 + tol) & (t <= self.t1 - tol)
        return self.space.inside(X[:, :-1], tol) & tmask

    def contains(self, X):
        return self.inside(np.atleast_2d(X), -1e-10)

    def is_box(self):
        return self.space.is_box()


def _sobol(n, d, rng):
    sampler = qmc.Sobol(d, scramble=True, seed=rng)
    m = int(math.ceil(math.log2(max(n, 2))))
    return sampler.random_base2(m)[:n]


def _interior(geom, n, rng, strategy):
    if strategy not in ("pseudo", "uniform"):
        raise ContractError(f"unknown sampling strategy {strategy!r}")
    if strategy == "pseudo":
        direct = geom._direct_interior(n, rng)
        if direct is not None:
            return direct
    base = geom.base if isinstance(geom, Difference) else geom
    lo, hi = geom.bbox()
    out = []
    have = 0
    tried = 0
    while have < n:
        batch = max(2 * (n - have), 64)
        if strategy == "uniform":
            cand = lo + _sobol(batch, geom.dim, rng) * (hi - lo)
        else:
            cand = base._direct_interior(batch, rng) if base is not geom else None
            if cand is None:
                cand = lo + rng.random((batch, geom.dim)) * (hi - lo)
        keep = cand[geom.inside(cand, 0.0)]
        tried += batch
        out.append(keep)
        have += len(keep)
        if tried >= 1000 and have / tried < MIN_ACCEPTANCE:
            raise GeometryError(f"rejection acceptance {have / tried:.4f} below {MIN_ACCEPTANCE}")
    return np.concatenate(out)[:n]


def sample_interior(geom, n, seed, strategy="pseudo"):
    """``n`` points strictly inside ``geom``; deterministic for a given seed."""
    if n < 1:
        raise ContractError("n must be >= 1")
    rng = np.random.default_rng(seed)
    if isinstance(geom, SpaceTime):
        xs = _interior(geom.space, n, rng, strategy)
        t = geom.t0 + rng.random(n) * (geom.t1 - geom.t0)
        return np.column_stack([xs, t])
    return _interior(geom, n, rng, strategy)


def _spatial_boundary(geom, n, rng):
    parts = geom.boundary_parts()
    measures = np.array([p.measure for p in parts], float)
    probs = measures / measures.sum()
    pts, nrms, tags = [], [], []
    have = 0
    tried = 0
    while have < n:
        batch = max(2 * (n - have), 64)
        counts = rng.multinomial(batch, probs)
        for part, k in zip(parts, counts):
            if k == 0:
                continue
            p, q = part.sampler(int(k), rng)
            ok = geom.on_boundary(p)
            pts.append(p[ok])
            nrms.append(q[ok])
            tags.extend([part.tag] * int(ok.sum()))
            have += int(ok.sum())
        tried += batch
        if tried >= 1000 and have / tried < MIN_ACCEPTANCE:
            raise GeometryError("boundary rejection acceptance too low")
    P = np.concatenate(pts)
    N = np.concatenate(nrms)
    T = np.array(tags, dtype=object)
    order = rng.permutation(len(P))[:n]
    return P[order], N[order], T[order]


def sample_boundary(geom, n, seed, initial_fraction=0.5):
    """Points on the boundary with outward unit normals and component tags.

    For space-time domains, ``initial_fraction`` of the points lie on the t=t0
    slice (tag "initial", normal -e_t) and the rest on the lateral boundary.
    """
    if n < 1:
        raise ContractError("n must be >= 1")
    rng = np.random.default_rng(seed)
    if not isinstance(geom, SpaceTime):
        return _spatial_boundary(geom, n, rng)
    n_init = int(round(n * initial_fraction))
    n_lat = n - n_init
    P, N, T = _spatial_boundary(geom.space, max(n_lat, 1), rng)
    P, N, T = P[:n_lat], N[:n_lat], T[:n_lat]
    t = geom.t0 + rng.random(n_lat) * (geom.t1 - geom.t0)
    lat = np.column_stack([P, t])
    lat_n = np.column_stack([N, np.zeros(n_lat)])
    xs = _interior(geom.space, max(n_init, 1), rng, "pseudo")[:n_init]
    init = np.column_stack([xs, np.full(n_init, geom.t0)])
    init_n = np.zeros((n_init, geom.dim))
    init_n[:, -1] = -1.0
    return (
        np.concatenate([lat, init]),
        np.concatenate([lat_n, init_n]),
        np.concatenate([T, np.array(["initial"] * n_init, dtype=object)]),
    )
