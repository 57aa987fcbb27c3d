"""Reference solution for Poisson2d-C by a harmonic least-squares expansion.

u is Laplace-harmonic in the square minus four disks, so it is expanded in
interior harmonic polynomials about the origin plus multipole terms
(log r and r^-n cos/sin) about every disk centre. Coefficients are fitted to
the Dirichlet data at dense boundary collocation points.

    python scripts/make_poisson2d_c_reference.py [--out data/Poisson2d-C.csv]
"""

import argparse
from pathlib import Path

import numpy as np

from pinnbench.pde import build_case, reference_grid
from pinnbench.pde.reference import write_reference

L = 0.5
CENTERS = [(0.3, 0.3), (-0.3, 0.3), (0.3, -0.3), (-0.3, -0.3)]
RADIUS = 0.1


def basis(P, n_poly=48, n_pole=24):
    x, y = P[:, 0], P[:, 1]
    z = (x + 1j * y) / (L * np.sqrt(2))
    cols = [np.ones(len(P))]
    zn = np.ones(len(P), complex)
    for _ in range(1, n_poly + 1):
        zn = zn * z
        cols += [zn.real, zn.imag]
    for cx, cy in CENTERS:
        w = (x - cx + 1j * (y - cy)) / RADIUS
        cols.append(np.log(np.abs(w)))
        wn = np.ones(len(P), complex)
        for _ in range(1, n_pole + 1):
            wn = wn / w
            cols += [wn.real, wn.imag]
    return np.column_stack(cols)


def boundary_data(n_side=800, n_circle=400):
    s = np.linspace(-L, L, n_side)
    rect = np.concatenate(
        [np.column_stack([s, -L + 0 * s]), np.column_stack([s, L + 0 * s]),
         np.column_stack([-L + 0 * s, s]), np.column_stack([L + 0 * s, s])]
    )
    th = np.linspace(0, 2 * np.pi, n_circle, endpoint=False)
    circ = np.concatenate([np.column_stack([cx + RADIUS * np.cos(th), cy + RADIUS * np.sin(th)]) for cx, cy in CENTERS])
    P = np.concatenate([rect, circ])
    g = np.concatenate([np.ones(len(rect)), np.zeros(len(circ))])
    return P, g


def solve():
    P, g = boundary_data()
    A = basis(P)
    scale = np.linalg.norm(A, axis=0)
    coef, *_ = np.linalg.lstsq(A / scale, g, rcond=None)
    coef = coef / scale
    # independent check on a finer boundary set
    Pc, gc = boundary_data(3001, 1501)
    err = np.max(np.abs(basis(Pc) @ coef - gc))
    return coef, err


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/Poisson2d-C.csv")
    args = ap.parse_args()
    coef, err = solve()
    print(f"max boundary error {err:.2e}")
    case = build_case("Poisson2d-C")
    P = reference_grid(case)
    u = basis(P) @ coef
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_reference(out, case.coords + case.fields, P, u[:, None])
    print(f"wrote {len(P)} points to {out}")


if __name__ == "__main__":
    main()
