"""Shared test utilities: independent oracles and random instance generators.

The oracles here deliberately avoid the library's solver paths: series are
summed term by term, feasibility is decided by eigenvalue checks inside a
plain bisection, and norms are recomputed from first principles.
"""

import math

import numpy as np

from multnorm.kernels import KernelSpec, kernel_eval


def series_kernel_value(spec, x, terms=4000):
    """Oracle: plain partial sums of sum a_n x^n."""
    total = 0j
    xn = 1.0 + 0j
    for n in range(terms):
        total += spec.coeff(n) * xn
        xn *= x
    return total


def feasibility_bisect(kernel, points, values, iters=60):
    """Oracle: smallest C with [K(z_i,z_j)(C^2 - v_i v_j*)] PSD, by bisection.

    Independent of the pencil solver: assembles the matrix directly and asks
    eigvalsh for feasibility.
    """
    n = len(points)
    values = np.asarray(values, dtype=complex)
    G = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            G[i, j] = kernel_eval(kernel, points[i], points[j])
    if values.ndim == 1:
        r = 1
        V = values.reshape(n, 1, 1)
    else:
        r = values.shape[1]
        V = values
    scale = max(np.max(np.abs(G)) * max(np.max(np.abs(V)) ** 2, 1.0), 1.0)

    def feasible(c):
        M = np.empty((n * r, n * r), dtype=complex)
        eye = np.eye(r)
        for i in range(n):
            for j in range(n):
                blk = G[i, j] * (c * c * eye - V[i] @ V[j].conj().T)
                M[i * r : (i + 1) * r, j * r : (j + 1) * r] = blk
        M = 0.5 * (M + M.conj().T)
        return np.linalg.eigvalsh(M)[0] >= -1e-11 * scale

    hi = 1.0 + float(np.max(np.abs(V)))
    while not feasible(hi):
        hi *= 2.0
        if hi > 1e12:
            raise RuntimeError("bisection bracket blew up")
    lo = 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def random_ball_points(rng, n, d, radius=0.9, min_sep=0.0):
    """n points in the radius-``radius`` ball of C^d, optionally separated."""
    pts = []
    while len(pts) < n:
        vec = rng.normal(size=2 * d)
        vec /= np.linalg.norm(vec)
        r = radius * rng.uniform() ** (1.0 / (2 * d))
        p = (vec[:d] + 1j * vec[d:]) * r
        if min_sep and any(np.linalg.norm(p - q) < min_sep for q in pts):
            continue
        pts.append(p)
    return pts


def random_kernel(rng):
    """A random kernel family instance for cross-family sweeps."""
    pick = rng.integers(0, 5)
    if pick == 0:
        return KernelSpec.szego()
    if pick == 1:
        a = rng.choice([0.0, 0.25, 0.5, 1.0, 2.0])
        d = int(rng.integers(1, 4))
        return KernelSpec.dirichlet(a, d)
    if pick == 2:
        s = rng.choice([-1.0, -0.5, 0.0, 0.5, 1.0])
        d = int(rng.integers(1, 4))
        return KernelSpec.hs(s, d)
    if pick == 3:
        return KernelSpec.tau_pullback(int(rng.integers(1, 4)))
    coeffs = [1.0] + [float(c) for c in rng.uniform(0.2, 2.0, size=6)]
    return KernelSpec.custom(coeffs, d=int(rng.integers(1, 3)))


def boundary_sup(poly_coeffs, grid=2048):
    """Oracle: sup |p| on the unit circle over a dense grid."""
    worst = 0.0
    for j in range(grid):
        z = complex(math.cos(2 * math.pi * j / grid), math.sin(2 * math.pi * j / grid))
        val = 0j
        for c in reversed(list(poly_coeffs)):
            val = val * z + complex(c)
        worst = max(worst, abs(val))
    return worst
