"""Degree-constrained Nevanlinna-Pick solving on the unit disc.

Two solvers are provided.  ``pick_solve`` runs the classical Schur
recursion at the critical scaling rho (the smallest feasible sup-norm of an
interpolant, equal to the two-sided pencil value from :mod:`picknorm`) and
emits the essentially unique extremal interpolant rho * lambda * B with B a
finite Blaschke product of degree at most n-1.  ``sarason_solve`` treats
matrix interpolation: given A with spectrum in the disc and ||f||_inf <= 1,
it produces lambda and B with f(A) = lambda B(A) by compressing M_f to the
model space H^2 (-) psi H^2, psi the Blaschke product over the spectrum,
and reading the interpolant off a maximal singular vector.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import picknorm
from .kernels import KernelSpec
from .poly import Poly

__all__ = [
    "BlaschkeProduct",
    "ModelSpaceProblem",
    "PickSolution",
    "SarasonSolution",
    "InterpolationError",
    "PreconditionError",
    "pick_solve",
    "sarason_solve",
    "eval_on_matrix",
    "szego_pick_matrix",
]


class InterpolationError(Exception):
    pass


class PreconditionError(InterpolationError):
    """Input violates a stated precondition (norm bound, spectral radius)."""


@dataclass(frozen=True)
class BlaschkeProduct:
    """lambda * prod_k b_{a_k}, with b_a(z) = (a - z)/(1 - conj(a) z), b_0(z) = z.

    The product part is unimodular on the unit circle; lam carries the
    scalar in the closed unit disc.
    """

    lam: complex
    zeros: Tuple[complex, ...] = ()

    def __post_init__(self):
        if abs(self.lam) > 1.0 + 1e-12:
            raise ValueError(f"|lambda| = {abs(self.lam)} exceeds 1")
        zs = tuple(complex(z) for z in self.zeros)
        if any(abs(z) >= 1.0 for z in zs):
            raise ValueError("Blaschke zeros must lie in the open disc")
        object.__setattr__(self, "lam", complex(self.lam))
        object.__setattr__(self, "zeros", zs)

    @property
    def degree(self):
        return len(self.zeros)

    def inner_eval(self, z):
        """The unimodular product part, without lambda."""
        z = complex(z)
        out = 1.0 + 0j
        for a in self.zeros:
            if a == 0:
                out *= z
            else:
                out *= (a - z) / (1.0 - a.conjugate() * z)
        return out

    def __call__(self, z):
        return self.lam * self.inner_eval(z)

    def boundary_defect(self, grid=256):
        """max | |B(zeta)| - 1 | of the product part over a boundary grid."""
        worst = 0.0
        for j in range(grid):
            zeta = cmath.exp(2j * math.pi * j / grid)
            worst = max(worst, abs(abs(self.inner_eval(zeta)) - 1.0))
        return worst

    def to_json_dict(self):
        return {
            "lambda": [self.lam.real, self.lam.imag],
            "zeros": [[z.real, z.imag] for z in self.zeros],
        }

    @staticmethod
    def from_json_dict(obj):
        lam = complex(obj["lambda"][0], obj["lambda"][1])
        zeros = [complex(re, im) for re, im in obj["zeros"]]
        return BlaschkeProduct(lam, tuple(zeros))


@dataclass
class PickSolution:
    """Extremal interpolant rho * B with B = lambda * (Blaschke product)."""

    rho: float
    blaschke: BlaschkeProduct

    def interpolant(self, z):
        return self.rho * self.blaschke(z)

    def residual(self, points, targets):
        return max(
            abs(self.interpolant(z) - w) for z, w in zip(points, targets)
        )

    def to_json_dict(self):
        return {"rho": self.rho, "blaschke": self.blaschke.to_json_dict()}


def szego_pick_matrix(points, targets, rho):
    """[(rho^2 - w_i conj(w_j)) / (1 - z_i conj(z_j))]."""
    z = np.asarray(points, dtype=complex)
    w = np.asarray(targets, dtype=complex)
    num = rho * rho - np.outer(w, np.conj(w))
    den = 1.0 - np.outer(z, np.conj(z))
    return num / den


def _critical_rho(points, targets):
    data = picknorm.PickData(
        KernelSpec.szego(), [np.array([z]) for z in points], np.asarray(targets)
    )
    return picknorm.n_point_norm_at(data)


def _poly_mul(p, q):
    return np.convolve(p, q)


def _unwind(consumed, terminal):
    """Rebuild the interpolant as a polynomial fraction P/Q from the recursion.

    Each consumed node contributes one Moebius composition
    f = (b f' + v) / (1 + conj(v) b f'), b(z) = (z - z0)/(1 - conj(z0) z).
    """
    P = np.array([terminal], dtype=complex)
    Q = np.array([1.0 + 0j])
    for z0, v in reversed(consumed):
        bn = np.array([-z0, 1.0], dtype=complex)  # z - z0 (ascending)
        bd = np.array([1.0, -np.conj(z0)], dtype=complex)  # 1 - conj(z0) z
        bP = _poly_mul(bn, P)
        dQ = _poly_mul(bd, Q)
        P = bP + v * dQ
        Q = dQ + np.conj(v) * bP
    return P, Q


def _poly_roots_ascending(p):
    p = np.asarray(p, dtype=complex)
    mask = np.abs(p) > 1e-13 * max(np.max(np.abs(p)), 1e-300)
    if not mask.any():
        return np.array([], dtype=complex)
    deg = np.max(np.nonzero(mask))
    if deg == 0:
        return np.array([], dtype=complex)
    return np.roots(p[deg::-1])


def _fit_scale(points, targets, rho, zeros):
    """Least-squares unimodular-disc scale for the product with given zeros."""
    probe = BlaschkeProduct(1.0, tuple(zeros))
    g = np.array([rho * probe.inner_eval(z) for z in points])
    t = np.asarray(targets, dtype=complex)
    denom = np.vdot(g, g).real
    if denom < 1e-300:
        return 0.0 + 0j
    return complex(np.vdot(g, t) / denom)


def pick_solve(points, targets, rho=None, rank_tol=1e-10):
    """Solve the scalar Nevanlinna-Pick problem at the critical scaling.

    Returns a PickSolution with rho * B(z_i) = w_i, deg B <= n - 1 and
    |lambda| <= 1.  ``rho`` defaults to the critical value computed from the
    Szego-kernel pencil; passing a larger value solves the strictly feasible
    problem instead.
    """
    points = [complex(z) for z in points]
    targets = [complex(w) for w in targets]
    if len(points) != len(targets):
        raise ValueError("points and targets must have equal length")
    if len(set(points)) != len(points):
        raise ValueError("interpolation nodes must be distinct")
    if any(abs(z) >= 1 for z in points):
        raise ValueError("interpolation nodes must lie in the open disc")
    if rho is None:
        rho = _critical_rho(points, targets)
    if rho < 1e-13:
        return PickSolution(0.0, BlaschkeProduct(0.0))

    vals = [w / rho for w in targets]
    nodes = list(points)
    consumed = []
    while True:
        vmax = max(abs(v) for v in vals)
        if vmax > 1.0 + 1e-6:
            raise InterpolationError(
                f"recursion left the disc (|v| = {vmax}); rho below critical?"
            )
        spread = max(abs(v - vals[0]) for v in vals)
        if spread <= rank_tol or len(nodes) == 1:
            terminal = vals[0]
            break
        z0, v0 = nodes[0], vals[0]
        if abs(v0) > 1.0:
            v0 /= abs(v0)
        consumed.append((z0, v0))
        new_nodes, new_vals = [], []
        for z, v in zip(nodes[1:], vals[1:]):
            b = (z - z0) / (1.0 - z0.conjugate() * z)
            num = v - v0
            den = 1.0 - v0.conjugate() * v
            new_nodes.append(z)
            new_vals.append((num / den) / b)
        nodes, vals = new_nodes, new_vals

    if abs(terminal) > 1.0:
        terminal /= abs(terminal)
    P, _ = _unwind(consumed, terminal)
    roots = _poly_roots_ascending(P)
    zeros = tuple(r for r in roots if abs(r) < 1.0)
    lam = _fit_scale(points, targets, rho, zeros)
    if abs(lam) > 1.0:
        if abs(lam) > 1.0 + 1e-7:
            raise InterpolationError(f"scale |lambda| = {abs(lam)} exceeds 1")
        lam /= abs(lam)
    solution = PickSolution(float(rho), BlaschkeProduct(lam, zeros))
    return solution


# --------------------------------------------------------------------------
# Sarason matrix interpolation
# --------------------------------------------------------------------------


@dataclass
class ModelSpaceProblem:
    """Matrix A with spectrum in the disc and a bounded symbol f."""

    A: np.ndarray
    f: Poly
    spectral_margin: float = 1e-6

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=complex)
        if self.A.ndim != 2 or self.A.shape[0] != self.A.shape[1]:
            raise ValueError("A must be square")
        if self.f.d != 1:
            raise ValueError("symbol must be univariate")
        radius = max(abs(np.linalg.eigvals(self.A)))
        if radius >= 1.0 - self.spectral_margin:
            raise PreconditionError(
                f"spectral radius {radius:.6f} >= 1 - {self.spectral_margin}"
            )


@dataclass
class SarasonSolution:
    blaschke: BlaschkeProduct
    norm: float  # ||P_K M_f|_K||, equals |lambda| of the interpolant
    nodes: Tuple[complex, ...]
    multiplicities: Tuple[int, ...]

    def to_json_dict(self):
        return {
            "blaschke": self.blaschke.to_json_dict(),
            "norm": self.norm,
            "nodes": [[z.real, z.imag] for z in self.nodes],
            "multiplicities": list(self.multiplicities),
        }


def _cluster_eigenvalues(eigs, tol):
    """Greedy merge of eigenvalues within tol; returns (centroids, counts)."""
    eigs = sorted(eigs, key=lambda z: (z.real, z.imag))
    groups: List[List[complex]] = []
    for e in eigs:
        for g in groups:
            if abs(e - g[0]) <= tol:
                g.append(e)
                break
        else:
            groups.append([e])
    nodes = tuple(sum(g) / len(g) for g in groups)
    mults = tuple(len(g) for g in groups)
    return nodes, mults


def _taylor_shift(coeffs, center, order):
    """Taylor coefficients of p(center + t) through t^order (synthetic division)."""
    work = list(np.asarray(coeffs, dtype=complex))
    out = []
    for _ in range(order + 1):
        # divide by (x - center); the remainder is the next Taylor coefficient
        carries = []
        carry = 0j
        for c in reversed(work):
            carry = c + carry * center
            carries.append(carry)
        out.append(carries[-1])
        work = list(reversed(carries[:-1])) or [0j]
    return np.array(out, dtype=complex)


def _cauchy_basis_taylor(i, c, p, order):
    """Taylor series at p of e_i(w) = i! w^i (1 - c w)^(-(i+1)), through t^order."""
    base = 1.0 - c * p
    # w^i = sum_nu C(i, nu) p^(i-nu) t^nu
    wi = np.zeros(order + 1, dtype=complex)
    for nu in range(min(i, order) + 1):
        wi[nu] = math.comb(i, nu) * p ** (i - nu)
    # (1 - c w)^(-(i+1)) = base^(-(i+1)) sum_nu C(i+nu, nu) (c/base)^nu t^nu
    geo = np.zeros(order + 1, dtype=complex)
    ratio = c / base
    for nu in range(order + 1):
        geo[nu] = math.comb(i + nu, nu) * ratio ** nu
    geo *= base ** (-(i + 1))
    prod = np.convolve(wi, geo)[: order + 1]
    return math.factorial(i) * prod


def _basis_index(mults):
    pairs = []
    for k, m in enumerate(mults):
        for j in range(m):
            pairs.append((k, j))
    return pairs


def sarason_solve(problem: ModelSpaceProblem, cluster_tol=1e-8, boundary_grid=1024):
    """Interpolate f on the matrix A: f(A) = lambda B(A), deg B <= n - 1.

    The model space is spanned by the Cauchy kernels and their derivative
    kernels at the clustered spectrum of A; the interpolant is the singular
    vector ratio of the compressed multiplication operator.
    """
    A, f = problem.A, problem.f
    n = A.shape[0]
    fc = np.asarray(f.univariate_coeffs(), dtype=complex)
    sup = max(
        abs(_poly_eval(fc, cmath.exp(2j * math.pi * j / boundary_grid)))
        for j in range(boundary_grid)
    )
    if sup > 1.0 + 1e-9:
        raise PreconditionError(f"||f||_inf = {sup:.12f} exceeds 1 on the boundary grid")

    eigs = np.linalg.eigvals(A)
    nodes, mults = _cluster_eigenvalues(eigs, cluster_tol)
    pairs = _basis_index(mults)
    row_of = {pair: idx for idx, pair in enumerate(pairs)}
    dim = len(pairs)

    # Gram and compressed-multiplication matrices from derivative pairings:
    # <g, e_{k,j}> = g^{(j)}(z_k) for the derivative kernels e_{k,j}.
    G = np.empty((dim, dim), dtype=complex)
    T = np.empty((dim, dim), dtype=complex)
    f_taylor = {}
    max_order = max(mults)
    for k, z in enumerate(nodes):
        f_taylor[k] = _taylor_shift(fc, z, max_order - 1)
    for col, (l, i) in enumerate(pairs):
        for k, z in enumerate(nodes):
            order = mults[k] - 1
            series = _cauchy_basis_taylor(i, np.conj(nodes[l]), z, order)
            fs = np.convolve(f_taylor[k][: order + 1], series)[: order + 1]
            for j in range(mults[k]):
                row = row_of[(k, j)]
                G[row, col] = math.factorial(j) * series[j]
                T[row, col] = math.factorial(j) * fs[j]

    G = 0.5 * (G + G.conj().T)
    try:
        L = np.linalg.cholesky(G)
        X = np.linalg.solve(L, T)
        W = np.linalg.solve(L, X.conj().T).conj().T
    except np.linalg.LinAlgError:
        warnings.warn(
            "ill-conditioned model-space Gram matrix; residual bound enlarged",
            RuntimeWarning,
        )
        w_eig, V = np.linalg.eigh(G)
        w_clip = np.maximum(w_eig, 1e-14 * w_eig[-1])
        G_isqrt = (V / np.sqrt(w_clip)) @ V.conj().T
        W = G_isqrt @ T @ G_isqrt
        L = None
    U, svals, Vh = np.linalg.svd(W)
    norm = float(svals[0])
    y = Vh[0].conj()
    if L is not None:
        u_c = np.linalg.solve(L.conj().T, y)
        t_c = np.linalg.solve(L.conj().T, np.linalg.solve(L, T @ u_c))
    else:
        u_c = G_isqrt @ y
        t_c = G_isqrt @ (G_isqrt @ (T @ u_c))

    # numerator/denominator over the common denominator prod (1 - conj(z_k) w)^{m_k}
    def lifted_poly(l, i):
        c = np.conj(nodes[l])
        poly = np.array([math.factorial(i)], dtype=complex)
        poly = np.convolve(poly, _monomial_power(i))
        poly = np.convolve(poly, _linear_power(-c, mults[l] - i - 1))
        for lp, m in enumerate(mults):
            if lp != l:
                poly = np.convolve(poly, _linear_power(-np.conj(nodes[lp]), m))
        return poly

    size = n  # degree bound n-1 -> n coefficients
    Upoly = np.zeros(size, dtype=complex)
    Vpoly = np.zeros(size, dtype=complex)
    for col, (l, i) in enumerate(pairs):
        lp = lifted_poly(l, i)
        Upoly[: len(lp)] += u_c[col] * lp
        Vpoly[: len(lp)] += t_c[col] * lp

    roots = _poly_roots_ascending(Vpoly)
    zeros = tuple(r for r in roots if abs(r) < 1.0)
    # phase fit on a small interior circle: V / (U * inner) should be constant
    probe = BlaschkeProduct(1.0, zeros)
    num, den = 0j, 0.0
    for j in range(16):
        w0 = 0.7 * cmath.exp(2j * math.pi * (j + 0.3) / 16)
        uval = _poly_eval(Upoly, w0)
        if abs(uval) < 1e-12:
            continue
        phi = _poly_eval(Vpoly, w0) / uval
        bval = probe.inner_eval(w0)
        num += phi * np.conj(bval)
        den += abs(bval) ** 2
    lam = num / den if den > 0 else 0j
    if abs(lam) > 1.0:
        if abs(lam) > 1.0 + 1e-7:
            raise InterpolationError(f"scale |lambda| = {abs(lam)} exceeds 1")
        lam /= abs(lam)
    return SarasonSolution(BlaschkeProduct(lam, zeros), norm, nodes, mults)


def _monomial_power(i):
    out = np.zeros(i + 1, dtype=complex)
    out[i] = 1.0
    return out


def _linear_power(coef, m):
    """(1 + coef * w)^m as ascending coefficients."""
    out = np.array([1.0 + 0j])
    lin = np.array([1.0, coef], dtype=complex)
    for _ in range(m):
        out = np.convolve(out, lin)
    return out


def _poly_eval(coeffs, z):
    out = 0j
    for c in reversed(coeffs):
        out = out * z + c
    return out


# --------------------------------------------------------------------------
# functional calculus
# --------------------------------------------------------------------------


def eval_on_matrix(g, A):
    """g(A) for a univariate Poly, a BlaschkeProduct, or a (num, den) pair.

    Rational symbols require all poles outside a disc containing the
    spectrum of A.
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    eye = np.eye(n, dtype=complex)
    if isinstance(g, Poly):
        coeffs = g.univariate_coeffs()
        out = np.zeros_like(A)
        for c in reversed(coeffs):
            out = out @ A + complex(c) * eye
        return out
    if isinstance(g, BlaschkeProduct):
        radius = max(abs(np.linalg.eigvals(A))) if n else 0.0
        out = g.lam * eye
        for a in g.zeros:
            if a == 0:
                out = out @ A
                continue
            if 1.0 / abs(a) <= radius + 1e-12:
                raise InterpolationError("pole inside the spectral disc")
            num = a * eye - A
            den = eye - np.conj(a) * A
            out = out @ np.linalg.solve(den.T, num.T).T
        return out
    if isinstance(g, tuple) and len(g) == 2:
        num_p, den_p = g
        den_c = den_p.univariate_coeffs()
        poles = _poly_roots_ascending(np.asarray(den_c, dtype=complex))
        radius = max(abs(np.linalg.eigvals(A))) if n else 0.0
        if any(abs(p) <= radius + 1e-12 for p in poles):
            raise InterpolationError("pole inside the spectral disc")
        num_m = eval_on_matrix(num_p, A)
        den_m = eval_on_matrix(den_p, A)
        return np.linalg.solve(den_m.T, num_m.T).T
    raise TypeError("unsupported symbol type for functional calculus")
