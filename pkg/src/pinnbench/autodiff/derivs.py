"""Batched input derivatives of network fields via torch autograd.

Points are independent, so the gradient of ``u.sum()`` with respect to the
input batch yields every per-point first partial in one backward pass. Higher
orders repeat this on the selected column. Every intermediate keeps its graph
so parameter gradients flow through the whole bundle.
"""

from __future__ import annotations

import torch

from pinnbench.errors import ContractError

MAX_ORDER = 4


def canonical(coord_names, path):
    """Map ``("x", "x")`` or ``(0, 0)`` to a sorted index tuple."""
    idx = []
    for c in path:
        if isinstance(c, str):
            if c not in coord_names:
                raise ContractError(f"unknown coordinate {c!r}; have {coord_names}")
            idx.append(coord_names.index(c))
        else:
            idx.append(int(c))
    return tuple(sorted(idx))


def multi_index_to_path(multi_index):
    return tuple(i for i, m in enumerate(multi_index) for _ in range(m))


class DerivativeBundle:
    """Field values and the requested partial derivatives at a batch of points.

    ``bundle("u", "x", "x")`` returns u_xx; asking for a derivative that was not
    requested at construction raises ``ContractError``.
    """

    def __init__(self, X, values, field_names, coord_names, derivs):
        self.X = X
        self.values = values
        self.field_names = tuple(field_names)
        self.coord_names = tuple(coord_names)
        self._derivs = derivs

    def __call__(self, field, *path):
        if field not in self.field_names:
            raise ContractError(f"unknown field {field!r}")
        key = (field, canonical(self.coord_names, path))
        if not key[1]:
            return self.values[:, self.field_names.index(field)]
        if key not in self._derivs:
            raise ContractError(f"derivative d{''.join(self.coord_names[i] for i in key[1])} of {field} not in bundle")
        return self._derivs[key]

    def __contains__(self, key):
        field, path = key
        return (field, canonical(self.coord_names, path)) in self._derivs or not path

    def keys(self):
        return list(self._derivs)

    @property
    def n(self):
        return self.X.shape[0]


def compute_bundle(fn, X, field_names, coord_names, requests):
    """Evaluate ``fn(X)`` and the partials listed in ``requests``.

    ``requests`` is an iterable of ``(field, path)`` where path is a tuple of
    coordinate names or indices, e.g. ``("u", ("x", "x"))``.
    """
    if not X.requires_grad:
        X = X.detach().requires_grad_(True)
    values = fn(X)
    if values.ndim == 1:
        values = values[:, None]
    keys = []
    for field, path in requests:
        key = (field, canonical(coord_names, path))
        if len(key[1]) > MAX_ORDER:
            raise ContractError(f"derivative order {len(key[1])} exceeds {MAX_ORDER}")
        if key[1] and key not in keys:
            keys.append(key)
    # full gradients cached per (field, prefix) so shared prefixes are reused;
    # a sorted path's prefixes are visited shortest first, so parents exist
    grads = {}
    derivs = {}
    for field, path in keys:
        for k in range(1, len(path) + 1):
            prefix, parent = path[:k], path[: k - 1]
            if (field, prefix) in derivs:
                continue
            if (field, parent) not in grads:
                base = derivs[(field, parent)] if parent else values[:, field_names.index(field)]
                g = None
                if base.requires_grad:
                    (g,) = torch.autograd.grad(base.sum(), X, create_graph=True, allow_unused=True)
                grads[(field, parent)] = torch.zeros_like(X) if g is None else g
            derivs[(field, prefix)] = grads[(field, parent)][:, prefix[-1]]
    return DerivativeBundle(X, values, field_names, coord_names, derivs)
