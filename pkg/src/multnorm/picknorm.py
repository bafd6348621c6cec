"""n-point multiplier norms as Hermitian pencil problems over Pick matrices.

For points z_1..z_n and values v_i (scalars or r x r matrices), the smallest
C >= 0 making [K(z_i, z_j) (C^2 - v_i v_j^*)] positive semidefinite is the
square root of the top eigenvalue of the pencil (B, A), where A is the Gram
matrix [K(z_i, z_j)] (tensored with the identity at matrix level) and B has
blocks K(z_i, z_j) v_i v_j^*.  A seeded multistart coordinate search
maximizes this quantity over point configurations, giving certified lower
bounds for multiplier norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
import scipy.linalg

from . import kernels
from .kernels import KernelSpec, as_point
from .poly import Poly

__all__ = [
    "PickData",
    "SearchConfig",
    "SearchResult",
    "SingularGramError",
    "CharacterizationError",
    "n_point_norm_at",
    "n_point_norm_bisect",
    "two_point_check",
    "trunc_mult_norm",
    "search_n_point_norm",
    "column_norm_lower_bound",
    "basis_multi_indices",
]

MERGE_TOL = 1e-9
GRAM_TOL = 1e-10
COND_LIMIT = 1e12


class SingularGramError(Exception):
    """Gram matrix not positive definite after merging duplicate points."""


class CharacterizationError(Exception):
    """Two-point criterion inapplicable (kernel vanishes at a required pair)."""


@dataclass
class PickData:
    """A finite multiplier-norm instance: kernel, points, target values.

    Values are either scalars (shape (n,)) or r x r matrices (shape (n, r, r)).
    Points closer than MERGE_TOL are merged, keeping the first value.
    """

    kernel: KernelSpec
    points: List[np.ndarray]
    values: np.ndarray

    def __init__(self, kernel, points, values):
        self.kernel = kernel
        pts = [as_point(p, kernel.d) for p in points]
        vals = np.asarray(values, dtype=complex)
        if vals.ndim == 1:
            pass
        elif vals.ndim == 3 and vals.shape[1] == vals.shape[2]:
            pass
        else:
            raise ValueError("values must be scalars or square matrices")
        if len(pts) != vals.shape[0]:
            raise ValueError("points and values must have equal length")
        keep_pts, keep_vals = [], []
        for p, v in zip(pts, vals):
            if any(np.linalg.norm(p - q) < MERGE_TOL for q in keep_pts):
                continue
            keep_pts.append(p)
            keep_vals.append(v)
        self.points = keep_pts
        self.values = np.asarray(keep_vals, dtype=complex)

    @property
    def n(self):
        return len(self.points)

    @property
    def matrix_level(self):
        return 1 if self.values.ndim == 1 else self.values.shape[1]

    def to_json_dict(self):
        return {
            "kernel": self.kernel.to_json_dict(),
            "points": [[[p.real, p.imag] for p in pt] for pt in self.points],
            "values": _complex_to_json(self.values),
        }

    @staticmethod
    def from_json_dict(obj):
        kernel = KernelSpec.from_json_dict(obj["kernel"])
        points = [
            np.array([complex(re, im) for re, im in pt]) for pt in obj["points"]
        ]
        values = _complex_from_json(obj["values"])
        return PickData(kernel, points, values)


def _complex_to_json(arr):
    arr = np.asarray(arr)
    if arr.ndim == 0:
        return [arr.real.item(), arr.imag.item()]
    return [_complex_to_json(sub) for sub in arr]


def _complex_from_json(obj):
    a = np.asarray(obj, dtype=float)
    if a.ndim >= 1 and a.shape[-1] == 2:
        return a[..., 0] + 1j * a[..., 1]
    raise ValueError("malformed complex array")


def _pencil_matrices(p: PickData):
    G = kernels.gram(p.kernel, p.points)
    n = p.n
    if p.values.ndim == 1:
        v = p.values
        A = G
        B = G * np.outer(v, np.conj(v))
        return A, B
    r = p.values.shape[1]
    A = np.kron(G, np.eye(r))
    B = np.empty((n * r, n * r), dtype=complex)
    for i in range(n):
        for j in range(n):
            blk = G[i, j] * (p.values[i] @ p.values[j].conj().T)
            B[i * r : (i + 1) * r, j * r : (j + 1) * r] = blk
    return A, B


def n_point_norm_at(p: PickData, cond_limit=COND_LIMIT, gram_tol=GRAM_TOL):
    """Multiplier norm of the restriction to the points of p.

    Solves the Hermitian pencil (B, A); falls back to bisection when the
    Gram matrix is too ill-conditioned for the congruence solve.
    """
    A, B = _pencil_matrices(p)
    A = 0.5 * (A + A.conj().T)
    B = 0.5 * (B + B.conj().T)
    eigs = np.linalg.eigvalsh(A)
    if eigs[0] <= gram_tol:
        raise SingularGramError(
            f"Gram matrix nearly singular (min eigenvalue {eigs[0]:.3e}); "
            "points may coincide or kernel may be degenerate"
        )
    if eigs[-1] / eigs[0] > cond_limit:
        return _norm_by_bisection(A, B)
    lam = scipy.linalg.eigh(B, A, eigvals_only=True)[-1]
    return math.sqrt(max(lam, 0.0))


def _norm_by_bisection(A, B, iters=80, feas_tol=1e-12):
    scale = max(np.linalg.norm(B, 2), 1.0)

    def feasible(c):
        w = np.linalg.eigvalsh(c * c * A - B)
        return w[0] >= -feas_tol * scale

    hi = math.sqrt(max(np.linalg.eigvalsh(B)[-1] / np.linalg.eigvalsh(A)[0], 0.0)) + 1.0
    lo = 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def n_point_norm_bisect(p: PickData, iters=80, feas_tol=1e-12):
    """Norm via PSD-feasibility bisection (conditioning-robust route)."""
    A, B = _pencil_matrices(p)
    A = 0.5 * (A + A.conj().T)
    B = 0.5 * (B + B.conj().T)
    return _norm_by_bisection(A, B, iters=iters, feas_tol=feas_tol)


def two_point_check(k: KernelSpec, z, w, fz, fw, tol=1e-12):
    """True iff the data admits a 2-point multiplier norm at most one.

    Characterization: either the two values agree and have modulus <= 1, or
    both lie in the open disc and the pseudohyperbolic distance of the values
    is at most the kernel pseudo-metric of the points.
    """
    for pair in ((z, z), (z, w), (w, w)):
        if abs(kernels.kernel_eval(k, *pair)) == 0.0:
            raise CharacterizationError("kernel vanishes; criterion inapplicable")
    fz = complex(fz)
    fw = complex(fw)
    if abs(fz - fw) <= tol * max(1.0, abs(fz), abs(fw)):
        return abs(fz) <= 1.0 + tol
    if abs(fz) >= 1.0 or abs(fw) >= 1.0:
        return False
    dh = kernels.delta_metric(k, z, w)
    return kernels.pseudohyperbolic(fz, fw) <= dh + tol


def basis_multi_indices(d, N):
    """All alpha in N_0^d with |alpha| <= N, in graded lexicographic order."""
    out = []

    def rec(prefix, remaining, slots):
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for v in range(remaining + 1):
            rec(prefix + (v,), remaining - v, slots - 1)

    for total in range(N + 1):
        rec((), total, d)
    return out


def _compression_matrix(k: KernelSpec, phi: Poly, N):
    basis = basis_multi_indices(k.d, N)
    index = {a: i for i, a in enumerate(basis)}
    norms = np.array([math.sqrt(kernels.monomial_norm_sq(k, a)) for a in basis])
    M = np.zeros((len(basis), len(basis)), dtype=complex)
    for gamma, c in phi.items():
        for a, i in index.items():
            beta = tuple(x + y for x, y in zip(a, gamma))
            j = index.get(beta)
            if j is not None:
                M[j, i] += complex(c) * norms[j] / norms[i]
    return M


def trunc_mult_norm(k: KernelSpec, phi, N):
    """Norm of the compression of [M_phi] to polynomials of degree <= N.

    ``phi`` is a Poly or a square nested list of Polys.  The value is a
    certified lower bound for the (matrix) multiplier norm, nondecreasing
    in N.
    """
    if isinstance(phi, Poly):
        entries = [[phi]]
    else:
        entries = [list(row) for row in phi]
    r = len(entries)
    if any(len(row) != r for row in entries):
        raise ValueError("matrix symbol must be square")
    blocks = [[_compression_matrix(k, entries[i][j], N) for j in range(r)] for i in range(r)]
    big = np.block(blocks)
    return float(np.linalg.norm(big, 2))


@dataclass(frozen=True)
class SearchConfig:
    """Settings for the multistart configuration search."""

    n: int
    restarts: int = 32
    max_iters: int = 60
    seed: int = 0xC0FFEE
    rho: float = 0.999
    init_step: float = 0.15

    def __post_init__(self):
        if self.n < 1 or self.restarts < 1:
            raise ValueError("n and restarts must be >= 1")
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must lie in (0, 1)")


@dataclass
class SearchResult:
    lower_bound: float
    witness: PickData
    restart: int

    def to_json_dict(self):
        return {
            "lower_bound": self.lower_bound,
            "witness": self.witness.to_json_dict(),
            "restart": self.restart,
        }


def _project_ball(pts, rho):
    for i in range(pts.shape[0]):
        r = np.linalg.norm(pts[i])
        if r > rho:
            pts[i] *= rho / r
    return pts


def _separate(pts):
    # deterministic jitter for collapsed configurations
    n = pts.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            if np.linalg.norm(pts[i] - pts[j]) < MERGE_TOL:
                pts[j] = pts[j] + (1e-6 * (j + 1)) * (1 + 1j) / math.sqrt(2)
    return pts


def search_n_point_norm(k: KernelSpec, phi, cfg: SearchConfig):
    """Seeded multistart ascent over n-point configurations.

    ``phi`` is a Poly or any callable point -> complex.  Returns the best
    certified lower bound found together with its witness configuration.
    Deterministic for a fixed (seed, restarts) pair.
    """
    if isinstance(phi, Poly):
        fn = lambda z: phi(z)
    elif callable(phi):
        fn = phi
    else:
        raise TypeError("phi must be a Poly or a callable")
    d = k.d

    def objective(flat):
        pts = _separate(flat.reshape(cfg.n, d).copy())
        _project_ball(pts, cfg.rho)
        vals = np.array([fn(p) for p in pts])
        data = PickData(k, list(pts), vals)
        try:
            return n_point_norm_at(data), data
        except SingularGramError:
            # nearly coincident points: drop to a coarser merged instance,
            # which still yields a valid lower bound
            keep_p, keep_v = [], []
            for p, v in zip(data.points, data.values):
                if all(np.linalg.norm(p - q) >= 1e-5 for q in keep_p):
                    keep_p.append(p)
                    keep_v.append(v)
            merged = PickData(k, keep_p, np.asarray(keep_v))
            try:
                return n_point_norm_at(merged), merged
            except SingularGramError:
                return -math.inf, merged

    best_val = -math.inf
    best_witness = None
    best_restart = -1
    for restart in range(cfg.restarts):
        rng = np.random.default_rng((cfg.seed, restart))
        # uniform in the radius-rho ball of C^d (real dimension 2d)
        pts = np.empty((cfg.n, d), dtype=complex)
        for i in range(cfg.n):
            vec = rng.normal(size=2 * d)
            vec /= np.linalg.norm(vec)
            radius = cfg.rho * rng.uniform() ** (1.0 / (2 * d))
            pts[i] = (vec[:d] + 1j * vec[d:]) * radius
        flat = pts.reshape(-1)
        val, wit = objective(flat)
        step = cfg.init_step * cfg.rho
        for _ in range(cfg.max_iters):
            improved = False
            for c in range(flat.size):
                for unit in (1.0, 1.0j):
                    base = flat[c]
                    f0 = val
                    flat[c] = base + step * unit
                    fp, wp = objective(flat)
                    flat[c] = base - step * unit
                    fm, wm = objective(flat)
                    cand = [(fp, base + step * unit, wp), (fm, base - step * unit, wm)]
                    denom = 2.0 * f0 - fp - fm
                    if denom > 1e-15:
                        t = 0.5 * step * (fp - fm) / denom
                        t = max(-3.0 * step, min(3.0 * step, t))
                        flat[c] = base + t * unit
                        ft, wt = objective(flat)
                        cand.append((ft, base + t * unit, wt))
                    fbest, cbest, wbest = max(cand, key=lambda e: e[0])
                    if fbest > f0 + 1e-12:
                        flat[c] = cbest
                        val, wit = fbest, wbest
                        improved = True
                    else:
                        flat[c] = base
            if not improved:
                step /= 3.0
                if step < 1e-5:
                    break
        if val > best_val:
            best_val = val
            best_witness = wit
            best_restart = restart
    return SearchResult(best_val, best_witness, best_restart)


def column_norm_lower_bound(k: KernelSpec, fns: Sequence[Poly]):
    """(sum_i ||f_i||^2)^(1/2): the column multiplier applied to the constant 1."""
    total = 0.0
    for f in fns:
        total += kernels.poly_norm_sq(k, f)
    return math.sqrt(total)
