"""Nestable forward-mode dual numbers.

A dual of depth k carries all mixed derivatives along k seeded directions, so
``input_derivative`` can reach fourth-order partials without symbolic work.
Primal/tangent slots accept floats, numpy arrays or further duals.
"""

from __future__ import annotations

import math

import numpy as np

from pinnbench.errors import ContractError

MAX_ORDER = 4


class Dual:
    __slots__ = ("primal", "tangent")

    def __init__(self, primal, tangent=0.0):
        self.primal = primal
        self.tangent = tangent

    def __repr__(self):
        return f"Dual({self.primal!r}, {self.tangent!r})"

    @staticmethod
    def _split(x):
        if isinstance(x, Dual):
            return x.primal, x.tangent
        return x, 0.0

    def __add__(self, other):
        p, t = self._split(other)
        return Dual(self.primal + p, self.tangent + t)

    __radd__ = __add__

    def __sub__(self, other):
        p, t = self._split(other)
        return Dual(self.primal - p, self.tangent - t)

    def __rsub__(self, other):
        p, t = self._split(other)
        return Dual(p - self.primal, t - self.tangent)

    def __mul__(self, other):
        p, t = self._split(other)
        return Dual(self.primal * p, self.tangent * p + self.primal * t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        p, t = self._split(other)
        return Dual(self.primal / p, (self.tangent * p - self.primal * t) / (p * p))

    def __rtruediv__(self, other):
        p, t = self._split(other)
        return Dual(p / self.primal, (t * self.primal - p * self.tangent) / (self.primal * self.primal))

    def __neg__(self):
        return Dual(-self.primal, -self.tangent)

    def __pow__(self, n):
        if isinstance(n, Dual):
            raise ContractError("dual exponents are not supported")
        return Dual(self.primal**n, n * self.primal ** (n - 1) * self.tangent)

    def __matmul__(self, other):
        p, t = self._split(other)
        return Dual(self.primal @ p, self.tangent @ p + self.primal @ t)

    def __rmatmul__(self, other):
        p, t = self._split(other)
        return Dual(p @ self.primal, t @ self.primal + p @ self.tangent)


def _lift(fn_float, fn_deriv):
    def f(x):
        if isinstance(x, Dual):
            return Dual(f(x.primal), fn_deriv(x.primal) * x.tangent)
        return fn_float(x)

    return f


def _np_or_math(np_fn, math_fn):
    def g(x):
        if isinstance(x, np.ndarray):
            return np_fn(x)
        return math_fn(x)

    return g


sin = _lift(_np_or_math(np.sin, math.sin), lambda x: cos(x))
cos = _lift(_np_or_math(np.cos, math.cos), lambda x: -sin(x))
exp = _lift(_np_or_math(np.exp, math.exp), lambda x: exp(x))
log = _lift(_np_or_math(np.log, math.log), lambda x: 1.0 / x)
tanh = _lift(_np_or_math(np.tanh, math.tanh), lambda x: 1.0 - tanh(x) * tanh(x))
sinh = _lift(_np_or_math(np.sinh, math.sinh), lambda x: cosh(x))
cosh = _lift(_np_or_math(np.cosh, math.cosh), lambda x: sinh(x))
sqrt = _lift(_np_or_math(np.sqrt, math.sqrt), lambda x: 0.5 / sqrt(x))


def _tangent(v):
    return v.tangent if isinstance(v, Dual) else 0.0 * v


def input_derivative(f, point, multi_index):
    """Mixed partial of scalar ``f`` at ``point``.

    ``multi_index[i]`` is the derivative order along coordinate ``i``; the total
    order must not exceed four.
    """
    point = [float(p) for p in point]
    multi_index = tuple(int(m) for m in multi_index)
    if len(multi_index) != len(point):
        raise ContractError("multi_index length must match point dimension")
    if any(m < 0 for m in multi_index):
        raise ContractError("negative derivative order")
    order = sum(multi_index)
    if order > MAX_ORDER:
        raise ContractError(f"derivative order {order} exceeds supported depth {MAX_ORDER}")
    directions = [i for i, m in enumerate(multi_index) for _ in range(m)]
    xs = list(point)
    for d in directions:
        xs = [Dual(x, _seed(x, 1.0 if j == d else 0.0)) for j, x in enumerate(xs)]
    y = f(*xs)
    for _ in directions:
        y = _tangent(y)
    return float(y) if not isinstance(y, Dual) else float(_strip(y))


def _seed(like, value):
    # tangent must have the same nesting depth as the primal it perturbs
    if isinstance(like, Dual):
        return Dual(_seed(like.primal, value), _seed(like.primal, 0.0))
    return value


def _strip(v):
    while isinstance(v, Dual):
        v = v.primal
    return v
