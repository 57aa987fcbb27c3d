"""Independent reference routes used by the tests.

Nothing here calls the torch code paths under test: networks are re-evaluated
in plain numpy, derivatives come from finite-difference stencils, spectra from
a direct O(N^2) DFT.
"""

import itertools

import numpy as np
import torch

from pinnbench.network.mlp import NetworkSpec, init_params


def random_net(rng, max_depth=3, max_width=16, input_dim=None, output_dim=1, adaptive="none"):
    depth = int(rng.integers(1, max_depth + 1))
    hidden = tuple(int(w) for w in rng.integers(1, max_width + 1, size=depth))
    d = input_dim or int(rng.integers(1, 4))
    spec = NetworkSpec(d, output_dim, hidden, adaptive=adaptive)
    net = init_params(spec, int(rng.integers(0, 2**31)))
    with torch.no_grad():
        for b in net.biases:  # nonzero biases exercise more of the graph
            b.copy_(torch.as_tensor(rng.normal(0, 0.3, b.shape)))
    return net


def np_weights(net, dtype=float):
    Ws = [W.detach().numpy().astype(dtype) for W in net.weights]
    bs = [b.detach().numpy().astype(dtype) for b in net.biases]
    return Ws, bs


def np_forward(Ws, bs, X, act=np.tanh):
    h = np.atleast_2d(X)
    for W, b in zip(Ws[:-1], bs[:-1]):
        h = act(h @ W + b)
    return h @ Ws[-1] + bs[-1]


def unflatten(net, flat):
    Ws, bs = np_weights(net)
    out_W, out_b, i = [], [], 0
    for W in Ws:
        out_W.append(flat[i : i + W.size].reshape(W.shape))
        i += W.size
    for b in bs:
        out_b.append(flat[i : i + b.size].reshape(b.shape))
        i += b.size
    return out_W, out_b


def _central_weights(order):
    # stencil offsets and weights for a central difference of the given order
    table = {
        0: ([0], [1.0]),
        1: ([-1, 1], [-0.5, 0.5]),
        2: ([-1, 0, 1], [1.0, -2.0, 1.0]),
        3: ([-2, -1, 1, 2], [-0.5, 1.0, -1.0, 0.5]),
        4: ([-2, -1, 0, 1, 2], [1.0, -4.0, 6.0, -4.0, 1.0]),
    }
    return table[order]


def fd_mixed(f, x, multi_index, h, dtype=float):
    """Tensor-product central difference of ``f`` (vectorized over rows) at ``x``.

    With ``dtype=np.longdouble`` the stencil points and the sum are formed in
    extended precision, which ``f`` should honour to benefit.
    """
    x = np.asarray(x, dtype)
    h = dtype(h)
    stencils = [_central_weights(m) for m in multi_index]
    offsets, weights = [], []
    for combo in itertools.product(*[range(len(s[0])) for s in stencils]):
        off = np.array([stencils[a][0][c] for a, c in enumerate(combo)], float)
        w = np.prod([stencils[a][1][c] for a, c in enumerate(combo)])
        offsets.append(off)
        weights.append(w)
    P = x[None, :] + h * np.array(offsets, dtype)
    vals = np.asarray(f(P)).reshape(len(P))
    return float(np.dot(np.array(weights, dtype), vals) / h ** sum(multi_index))


def fd_mixed_richardson(f, x, multi_index, h=0.04, levels=3, dtype=float):
    """Central differences are even in h, so Richardson steps cancel h^2, h^4, ..."""
    T = [fd_mixed(f, x, multi_index, h / 2**k, dtype) for k in range(levels)]
    for j in range(1, levels):
        T = [(4**j * T[k + 1] - T[k]) / (4**j - 1) for k in range(len(T) - 1)]
    return T[0]


def direct_dft(y):
    n = len(y)
    k = np.arange(n)
    M = np.exp(-2j * np.pi * np.outer(k, k) / n)
    return M @ y


def dft_band_mse(pred, truth, kmin, kmax):
    """Mean squared spectral magnitude error over integer wavenumbers |k| in [kmin, kmax]."""
    d = direct_dft(np.asarray(pred, float) - np.asarray(truth, float))
    n = len(d)
    kk = np.array([min(k, n - k) for k in range(n)])
    sel = (kk >= kmin) & (kk <= kmax)
    return d, kk, sel
