"""Central finite-difference oracles for the derivative machinery."""

from __future__ import annotations

import numpy as np

from pinnbench.autodiff.dual import input_derivative


def rel_err(a, b, floor=1e-8):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)
    return float(np.max(np.abs(a - b) / scale))


def central_diff(f, point, axis, h):
    point = np.asarray(point, dtype=float)
    e = np.zeros_like(point)
    e[axis] = h
    return (f(point + e) - f(point - e)) / (2.0 * h)


def finite_difference_check(f, point, h=1e-4, floor=1e-8):
    """Worst relative discrepancy between the dual-number gradient of ``f`` and
    a central difference at ``point``.

    ``f`` takes one positional argument per coordinate and must be written with
    the operators in :mod:`pinnbench.autodiff.dual`.
    """
    point = [float(p) for p in point]
    worst = 0.0
    for i in range(len(point)):
        mi = [0] * len(point)
        mi[i] = 1
        exact = input_derivative(f, point, mi)
        fd = central_diff(lambda p: float(f(*p)), point, i, h)
        worst = max(worst, rel_err(exact, fd, floor))
    return worst


def param_fd_gradient(loss_fn, flat, h=1e-5):
    """Central-difference gradient of ``loss_fn(flat_vector)`` (numpy in, float out)."""
    flat = np.asarray(flat, dtype=float)
    g = np.empty_like(flat)
    for i in range(flat.size):
        g[i] = central_diff(loss_fn, flat, i, h)
    return g
