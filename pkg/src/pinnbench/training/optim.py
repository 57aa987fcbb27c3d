"""Adam, MultiAdam and L-BFGS on flat float64 parameter vectors."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import torch

from pinnbench import DTYPE
from pinnbench.errors import ContractError, Divergence


def _finite(g, what="gradient"):
    if not torch.isfinite(g).all():
        raise Divergence(f"non-finite {what}")


@dataclass
class AdamState:
    n: int
    lr: float = 1e-3
    betas: tuple[float, float] = (0.9, 0.999)
    eps: float = 1e-8
    t: int = 0
    m: torch.Tensor = None
    v: torch.Tensor = None

    def __post_init__(self):
        if self.m is None:
            self.m = torch.zeros(self.n, dtype=DTYPE)
        if self.v is None:
            self.v = torch.zeros(self.n, dtype=DTYPE)


def adam_direction(state: AdamState, g):
    """Advance the moments by ``g`` and return the bias-corrected direction."""
    _finite(g)
    if g.shape != state.m.shape:
        raise ContractError("gradient length does not match the optimizer state")
    b1, b2 = state.betas
    state.t += 1
    state.m = b1 * state.m + (1 - b1) * g
    state.v = b2 * state.v + (1 - b2) * g * g
    m_hat = state.m / (1 - b1**state.t)
    v_hat = state.v / (1 - b2**state.t)
    return m_hat / (torch.sqrt(v_hat) + state.eps)


def adam_step(state: AdamState, g, params):
    return params - state.lr * adam_direction(state, g)


DEFAULT_GROUPS = {"pde": ("pde", "gpinn"), "bc": ("boundary", "initial", "data")}


@dataclass
class MultiAdamState:
    """One Adam state per loss group; the applied step averages group directions."""

    n: int
    groups: tuple[str, ...] = ("pde", "bc")
    lr: float = 1e-3
    betas: tuple[float, float] = (0.9, 0.999)
    eps: float = 1e-8
    states: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.groups:
            raise ContractError("MultiAdam needs at least one group")
        for gname in self.groups:
            self.states.setdefault(gname, AdamState(self.n, self.lr, self.betas, self.eps))


def multiadam_step(state: MultiAdamState, grads: dict, params):
    if set(grads) != set(state.groups):
        raise ContractError(f"group gradients {sorted(grads)} do not cover {sorted(state.groups)}")
    dirs = [adam_direction(state.states[g], grads[g]) for g in state.groups]
    return params - state.lr * (sum(dirs) / len(dirs))


# --- L-BFGS ------------------------------------------------------------------


def _cubic_min(x1, f1, g1, x2, f2, g2, lo, hi):
    d1 = g1 + g2 - 3 * (f1 - f2) / (x1 - x2)
    sq = d1 * d1 - g1 * g2
    if sq >= 0:
        d2 = math.sqrt(sq) * (1 if x2 > x1 else -1)
        t = x2 - (x2 - x1) * ((g2 + d2 - d1) / (g2 - g1 + 2 * d2))
        if lo <= t <= hi:
            return t
    return 0.5 * (lo + hi)


@dataclass
class LBFGS:
    """Limited-memory BFGS with a strong-Wolfe line search.

    ``step(fun, x)`` takes ``fun(x) -> (loss, grad)`` on flat tensors and
    returns the new iterate and its loss. A failed line search rejects the
    step and clears the curvature history.
    """

    history: int = 50
    c1: float = 1e-4
    c2: float = 0.9
    max_ls: int = 25
    lr: float = 1.0
    s_hist: list = field(default_factory=list)
    y_hist: list = field(default_factory=list)
    n_iter: int = 0
    _f: float | None = None
    _g: torch.Tensor | None = None

    def reset(self):
        self.s_hist.clear()
        self.y_hist.clear()

    def direction(self, g):
        """Two-loop recursion; steepest descent when the history is empty."""
        q = -g.clone()
        alphas = []
        for s, y in reversed(list(zip(self.s_hist, self.y_hist))):
            rho = 1.0 / torch.dot(y, s)
            a = rho * torch.dot(s, q)
            q = q - a * y
            alphas.append((rho, a))
        if self.s_hist:
            s, y = self.s_hist[-1], self.y_hist[-1]
            q = q * (torch.dot(s, y) / torch.dot(y, y))
        for (s, y), (rho, a) in zip(zip(self.s_hist, self.y_hist), reversed(alphas)):
            b = rho * torch.dot(y, q)
            q = q + (a - b) * s
        return q

    def _eval(self, fun, x):
        f, g = fun(x)
        f = float(f)
        if not math.isfinite(f) or not torch.isfinite(g).all():
            raise Divergence("non-finite loss in L-BFGS line search")
        return f, g

    def _line_search(self, fun, x, f0, g0, d, t):
        dg0 = float(torch.dot(g0, d))
        t_prev, f_prev, dg_prev = 0.0, f0, dg0
        g_prev = g0
        for i in range(self.max_ls):
            f, g = self._eval(fun, x + t * d)
            dg = float(torch.dot(g, d))
            if f > f0 + self.c1 * t * dg0 or (i > 0 and f >= f_prev):
                return self._zoom(fun, x, f0, dg0, d, t_prev, f_prev, dg_prev, g_prev, t, f, dg, g)
            if abs(dg) <= -self.c2 * dg0:
                return t, f, g
            if dg >= 0:
                return self._zoom(fun, x, f0, dg0, d, t, f, dg, g, t_prev, f_prev, dg_prev, g_prev)
            t_prev, f_prev, dg_prev, g_prev = t, f, dg, g
            t = t * 2.0
        return None

    def _zoom(self, fun, x, f0, dg0, d, tlo, flo, dglo, glo, thi, fhi, dghi, ghi):
        for _ in range(self.max_ls):
            a, b = min(tlo, thi), max(tlo, thi)
            t = _cubic_min(tlo, flo, dglo, thi, fhi, dghi, a + 0.1 * (b - a), b - 0.1 * (b - a))
            f, g = self._eval(fun, x + t * d)
            dg = float(torch.dot(g, d))
            if f > f0 + self.c1 * t * dg0 or f >= flo:
                thi, fhi, dghi, ghi = t, f, dg, g
            else:
                if abs(dg) <= -self.c2 * dg0:
                    return t, f, g
                if dg * (thi - tlo) >= 0:
                    thi, fhi, dghi, ghi = tlo, flo, dglo, glo
                tlo, flo, dglo, glo = t, f, dg, g
            if abs(thi - tlo) < 1e-16:
                break
        return None

    def step(self, fun, x):
        if self._g is None:
            self._f, self._g = self._eval(fun, x)
        f0, g0 = self._f, self._g
        if float(torch.abs(g0).max()) == 0.0:
            return x, f0
        d = self.direction(g0)
        if float(torch.dot(d, g0)) >= 0:
            self.reset()
            d = -g0
        if self.n_iter == 0 or not self.s_hist:
            t = min(1.0, 1.0 / float(torch.abs(g0).sum())) * self.lr
        else:
            t = self.lr
        self.n_iter += 1
        found = self._line_search(fun, x, f0, g0, d, t)
        if found is None:
            self.reset()
            return x, f0
        t, f, g = found
        s = t * d
        y = g - g0
        if float(torch.dot(s, y)) > 1e-10:
            self.s_hist.append(s)
            self.y_hist.append(y)
            if len(self.s_hist) > self.history:
                self.s_hist.pop(0)
                self.y_hist.pop(0)
        self._f, self._g = f, g
        return x + s, f

    def invalidate(self):
        """Forget the cached loss/gradient (call after the objective changes)."""
        self._f = self._g = None


def lbfgs_step(opt: LBFGS, fun, x):
    return opt.step(fun, x)
