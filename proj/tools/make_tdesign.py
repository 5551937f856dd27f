#!/usr/bin/env python3
"""Generate spherical t-design point files used by the experiment.

Writes des.3.<N>.<t>.txt files in Hardin-Sloane layout (one coordinate per
line, point-major). Designs are found numerically by driving the equal-weight
sums of all spherical harmonics of degree 1..t to zero, then polished with
minimum-norm Newton steps. The 48-point 9-design is searched for as two orbits
of the chiral octahedral group, which is how designs of that size exist.

Usage: make_tdesign.py OUTDIR
"""
import itertools
import sys

import numpy as np
from scipy.optimize import least_squares
from scipy.special import sph_harm_y


def harmonic_sums(points, t):
    x, y, z = points.T
    polar = np.arccos(np.clip(z, -1.0, 1.0))
    azim = np.arctan2(y, x)
    res = []
    for n in range(1, t + 1):
        for m in range(0, n + 1):
            s = sph_harm_y(n, m, polar, azim).sum()
            res.append(s.real)
            if m > 0:
                res.append(s.imag)
    return np.array(res)


def octahedral_rotations():
    mats = []
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1, -1), repeat=3):
            m = np.zeros((3, 3))
            for row, (col, sg) in enumerate(zip(perm, signs)):
                m[row, col] = sg
            if np.isclose(np.linalg.det(m), 1.0):
                mats.append(m)
    assert len(mats) == 24
    return np.array(mats)


def normalize_rows(p):
    return p / np.linalg.norm(p, axis=1, keepdims=True)


def polish(fun, x0, iters=30):
    x = x0.copy()
    for _ in range(iters):
        r = fun(x)
        if np.max(np.abs(r)) < 1e-15:
            break
        eps = 1e-7
        jac = np.empty((r.size, x.size))
        for i in range(x.size):
            dx = np.zeros_like(x)
            dx[i] = eps
            jac[:, i] = (fun(x + dx) - fun(x - dx)) / (2 * eps)
        step = np.linalg.lstsq(jac, -r, rcond=None)[0]
        x = x + step
    return x


def min_separation(points):
    d = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=-1)
    d[np.diag_indices(len(points))] = np.inf
    return d.min()


def generic_design(n_points, t, rng):
    def build(x):
        return normalize_rows(x.reshape(n_points, 3))

    def fun(x):
        return harmonic_sums(build(x), t)

    for _ in range(200):
        x0 = rng.normal(size=3 * n_points)
        sol = least_squares(fun, x0, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15)
        x = polish(fun, sol.x)
        pts = build(x)
        if np.max(np.abs(fun(x))) < 1e-13 and min_separation(pts) > 0.2:
            return pts
    raise RuntimeError("no design found")


def octahedral_design(t, rng):
    group = octahedral_rotations()

    def build(x):
        seeds = normalize_rows(x.reshape(2, 3))
        return np.concatenate([seeds @ g.T for g in group])

    def fun(x):
        return harmonic_sums(build(x), t)

    for _ in range(2000):
        x0 = rng.normal(size=6)
        sol = least_squares(fun, x0, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15)
        x = polish(fun, sol.x)
        pts = build(x)
        if np.max(np.abs(fun(x))) < 1e-13 and min_separation(pts) > 0.2:
            return pts
    raise RuntimeError("no design found")


def write(path, pts):
    with open(path, "w") as f:
        for p in pts:
            for c in p:
                f.write(f"{c:.17g}\n")


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "."
    rng = np.random.default_rng(20240601)
    d6 = generic_design(26, 6, rng)
    write(f"{out}/des.3.26.6.txt", d6)
    print("26/6 residual", np.max(np.abs(harmonic_sums(d6, 6))), "sep", min_separation(d6))
    d9 = octahedral_design(9, rng)
    write(f"{out}/des.3.48.9.txt", d9)
    print("48/9 residual", np.max(np.abs(harmonic_sums(d9, 9))), "sep", min_separation(d9))


if __name__ == "__main__":
    main()
