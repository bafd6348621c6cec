"""Weighted shift truncations, triangular domination, and weight scans.

Weight families (all squared weights are positive rationals times a rational
base raised to the power -s):

* ``da``:   w_{k,alpha}^2 = d^d prod_j (alpha_j + k + 1) / prod_j (|alpha| + kd + j)
* ``hs``:   the ``da`` value times (1 + d/(|alpha| + kd + 1))^(-s)
* ``v``:    v_{k,r}^2 = d^d (r/d + k + 1)^d / prod_j (r + kd + j)
            times (1 + d/(r + kd + 1))^(-s)
* ``u``:    u_k^2 = d^d (k + 1)^d / prod_j (kd + j)
            times (1 + d/(d + kd + 1))^(-s)
* ``custom``: an explicit positive weight list.

The inequality scans assert the domination relations between these families
in exact arithmetic: comparisons of R1 * t1^(-s) vs R2 * t2^(-s) with
rational R, t, s reduce to integer comparisons of rational powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .poly import Poly

__all__ = [
    "ShiftSpec",
    "GradedSpacePair",
    "ScanReport",
    "RatioMonotonicityError",
    "ScanViolation",
    "shift_weights",
    "shift_matrix",
    "poly_calc_norm",
    "kacnelson_check",
    "weight_inequality_scan",
    "da_weight_sq",
    "hs_weight_sq_parts",
    "v_weight_sq_parts",
    "u_weight_sq_parts",
    "rational_power_leq",
]


class RatioMonotonicityError(Exception):
    """The norm-ratio sequence is not nondecreasing; domination is void."""


class ScanViolation(Exception):
    """An asserted weight inequality failed (treated as an implementation bug)."""


# ------------------------------------------------------------------ weights


def da_weight_sq(d, alpha, k) -> Fraction:
    """Exact squared shift weight of multiplication by the monomial pullback."""
    alpha = tuple(int(a) for a in alpha)
    m = sum(alpha)
    num = Fraction(d ** d)
    for a in alpha:
        num *= a + k + 1
    den = Fraction(1)
    for j in range(1, d + 1):
        den *= m + k * d + j
    return num / den


def _base(d, m, k) -> Fraction:
    return Fraction(m + k * d + 1 + d, m + k * d + 1)


def hs_weight_sq_parts(d, s, alpha, k):
    """(R, t) with weight^2 = R * t^(-s)."""
    alpha = tuple(int(a) for a in alpha)
    return da_weight_sq(d, alpha, k), _base(d, sum(alpha), k)


def v_weight_sq_parts(d, s, r, k):
    num = Fraction((r + k * d + d) ** d)
    den = Fraction(1)
    for j in range(1, d + 1):
        den *= r + k * d + j
    return num / den, _base(d, r, k)


def u_weight_sq_parts(d, s, k):
    num = Fraction(d ** d * (k + 1) ** d)
    den = Fraction(1)
    for j in range(1, d + 1):
        den *= k * d + j
    return num / den, _base(d, d, k)


def rational_power_leq(R1, t1, R2, t2, s) -> bool:
    """Exact test of R1 * t1^(-s) <= R2 * t2^(-s) for positive rationals.

    Equivalent to (R1/R2)^q <= (t1/t2)^p with s = p/q, q > 0.
    """
    s = Fraction(s)
    rho = Fraction(R1) / Fraction(R2)
    beta = Fraction(t1) / Fraction(t2)
    p, q = s.numerator, s.denominator
    return rho ** q <= beta ** p


@dataclass(frozen=True)
class ShiftSpec:
    """A positive weight sequence generator with truncation length N."""

    family: str
    N: int = 30
    d: int = 1
    s: Fraction = Fraction(0)
    alpha: Tuple[int, ...] = ()
    r: int = 0
    weights: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.family not in ("da", "hs", "v", "u", "custom"):
            raise ValueError(f"unknown shift family {self.family!r}")
        if self.N < 1:
            raise ValueError("truncation length must be >= 1")
        object.__setattr__(self, "s", Fraction(self.s))
        if self.family in ("da", "hs"):
            alpha = tuple(int(a) for a in self.alpha)
            if len(alpha) != self.d or any(a < 0 for a in alpha):
                raise ValueError("alpha must be a multi-index of length d")
            object.__setattr__(self, "alpha", alpha)
        if self.family == "custom":
            w = tuple(float(x) for x in self.weights)
            if len(w) < self.N or any(x <= 0 for x in w):
                raise ValueError("custom weights must be positive and cover N")
            object.__setattr__(self, "weights", w)

    # constructors
    @staticmethod
    def da(d, alpha, N=30):
        return ShiftSpec("da", N=N, d=d, alpha=tuple(alpha))

    @staticmethod
    def hs(d, s, alpha, N=30):
        return ShiftSpec("hs", N=N, d=d, s=Fraction(s), alpha=tuple(alpha))

    @staticmethod
    def v(d, s, r, N=30):
        return ShiftSpec("v", N=N, d=d, s=Fraction(s), r=int(r))

    @staticmethod
    def u(d, s, N=30):
        return ShiftSpec("u", N=N, d=d, s=Fraction(s))

    @staticmethod
    def custom(weights, N=None):
        weights = tuple(weights)
        return ShiftSpec("custom", N=N or len(weights), weights=weights)

    def weight_sq_parts(self, k):
        if self.family == "da":
            return da_weight_sq(self.d, self.alpha, k), Fraction(1)
        if self.family == "hs":
            return hs_weight_sq_parts(self.d, self.s, self.alpha, k)
        if self.family == "v":
            return v_weight_sq_parts(self.d, self.s, self.r, k)
        if self.family == "u":
            return u_weight_sq_parts(self.d, self.s, k)
        raise ValueError("custom shifts have no structured parts")

    def weight_sq_exact(self, k) -> Fraction:
        """Exact squared weight; requires an integer exponent s."""
        if self.family == "custom":
            raise ValueError("custom weights are not exact by construction")
        R, t = self.weight_sq_parts(k)
        if self.s == 0 or self.family == "da":
            return R
        if self.s.denominator != 1:
            raise ValueError("exact weights need an integer s")
        return R * t ** (-self.s.numerator)

    def weight(self, k) -> float:
        if self.family == "custom":
            return self.weights[k]
        R, t = self.weight_sq_parts(k)
        if self.family == "da" or self.s == 0:
            return math.sqrt(float(R))
        return math.sqrt(float(R) * float(t) ** (-float(self.s)))


def shift_weights(spec: ShiftSpec) -> np.ndarray:
    """The first N weights of the shift as a float vector."""
    return np.array([spec.weight(k) for k in range(spec.N)])


def shift_matrix(spec: ShiftSpec) -> np.ndarray:
    """(N+1) x (N+1) nilpotent lower-triangular truncation of the shift."""
    w = shift_weights(spec)
    M = np.zeros((spec.N + 1, spec.N + 1))
    for k in range(spec.N):
        M[k + 1, k] = w[k]
    return M


def poly_calc_norm(spec: ShiftSpec, P) -> float:
    """||[p_ij(S)]|| for the truncated shift S and a (matrix of) polynomial(s).

    Truncations of a raising shift are multiplicative, so this is the exact
    norm of the compressed polynomial calculus at length N.
    """
    if isinstance(P, Poly):
        entries = [[P]]
    else:
        entries = [list(row) for row in P]
    r = len(entries)
    if any(len(row) != r for row in entries):
        raise ValueError("matrix polynomial must be square")
    S = shift_matrix(spec).astype(complex)
    m = S.shape[0]
    eye = np.eye(m, dtype=complex)
    blocks = []
    for row in entries:
        brow = []
        for p in row:
            coeffs = p.univariate_coeffs()
            out = np.zeros_like(S)
            for c in reversed(coeffs):
                out = out @ S + complex(c) * eye
            brow.append(out)
        blocks.append(brow)
    return float(np.linalg.norm(np.block(blocks), 2))


@dataclass
class GradedSpacePair:
    """Two positive norm sequences over a shared ordered orthogonal basis.

    The ratio h_i / k_i must be nondecreasing; construction verifies this.
    """

    h: np.ndarray
    k: np.ndarray

    def __init__(self, h, k, rel_tol=1e-12):
        h = np.asarray(h, dtype=float)
        k = np.asarray(k, dtype=float)
        if h.shape != k.shape or h.ndim != 1 or h.size == 0:
            raise ValueError("norm sequences must be equal-length vectors")
        if np.any(h <= 0) or np.any(k <= 0):
            raise ValueError("norm sequences must be positive")
        lhs = h[1:] * k[:-1]
        rhs = h[:-1] * k[1:]
        if np.any(lhs < rhs * (1.0 - rel_tol)):
            raise RatioMonotonicityError("h_i / k_i is not nondecreasing")
        self.h = h
        self.k = k


def kacnelson_check(pair: GradedSpacePair, T) -> Tuple[float, float, bool]:
    """Norms of a lower-triangular T in both weighted bases, plus the verdict.

    Returns (norm_H, norm_K, norm_K <= norm_H + 1e-9).
    """
    T = np.asarray(T, dtype=complex)
    m = T.shape[0]
    if T.shape != (m, m) or m != pair.h.size:
        raise ValueError("T must be square and match the norm sequences")
    if np.max(np.abs(np.triu(T, 1))) > 1e-14 * max(np.max(np.abs(T)), 1.0):
        raise ValueError("T must be lower triangular")
    norm_h = float(np.linalg.norm((pair.h[:, None] * T) / pair.h[None, :], 2))
    norm_k = float(np.linalg.norm((pair.k[:, None] * T) / pair.k[None, :], 2))
    return norm_h, norm_k, norm_k <= norm_h + 1e-9


# ------------------------------------------------------------------ scans


@dataclass
class ScanReport:
    family: str
    ranges: dict
    checks: int
    violations: List[dict]
    worst_margin: Optional[str]

    @property
    def ok(self):
        return not self.violations

    def to_json_dict(self):
        return {
            "family": self.family,
            "ranges": self.ranges,
            "checks": self.checks,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
        }

    def raise_on_violation(self):
        if self.violations:
            raise ScanViolation(f"{len(self.violations)} violations: {self.violations[:3]}")


def _partitions_upto(total, parts):
    """All nonincreasing exponent tuples with ``parts`` slots and sum <= total.

    Returned as an int64 array; every multiset of exponents appears exactly
    once.  The scanned weight formulas are symmetric in alpha, so these
    representatives cover all multi-indices.
    """
    cols = [np.arange(total + 1, dtype=np.int64)]
    rem = total - cols[0]
    cap = cols[0].copy()
    for _ in range(1, parts):
        counts = np.minimum(cap, rem) + 1
        idx = np.repeat(np.cumsum(counts) - counts, counts)
        new = np.arange(counts.sum(), dtype=np.int64) - idx
        cols = [np.repeat(c, counts) for c in cols]
        rem = np.repeat(rem, counts) - new
        cap = new
        cols.append(new)
    return np.column_stack(cols)


def weight_inequality_scan(
    d, s, k_max, alpha_max, inject_violation=False
) -> ScanReport:
    """Exact verification of the shift-weight dominations.

    Checks, over all k <= k_max and all multi-indices with |alpha| <= alpha_max:

    (a) w_{k,alpha} <= v_{k,|alpha|}          (any s; the exponent factors agree)
    (b) v_{k,r} = v_{k+l,t} for r = l d + t   (structural identity)
    (c) v_{k,r} <= v_{k,0} and w_{k,alpha} <= w_{k,0}   (s <= 0)
    (d) v_{k,r} <= u_k for inner 0 <= r <= d            (s >= 0)

    ``s`` may be a single rational or a sequence; the s-independent checks
    run once.  All assertions are exact: (a) reduces to a bounded integer
    comparison d^d prod(alpha_j+k+1) <= (|alpha|+kd+d)^d, checked for every
    enumerated alpha in int64 arithmetic with verified overflow headroom;
    the r-indexed comparisons use exact rational powers.  The alpha-indexed
    bound in (c) follows from (a), (c) for v, and the identity
    v_{k,0} = w_{k,0}, each of which is checked exactly; small ranges are
    additionally cross-checked coefficientwise with Fractions.
    """
    if isinstance(s, (list, tuple)):
        s_values = [Fraction(x) for x in s]
    else:
        s_values = [Fraction(s)]
    violations: List[dict] = []
    checks = 0
    worst: Optional[Fraction] = None
    worst_float = math.inf

    def note_margin(margin_float, margin_exact=None):
        nonlocal worst, worst_float
        if margin_float < worst_float:
            worst_float = margin_float
            worst = margin_exact

    # --- (a): d^d prod_j (alpha_j + k + 1) <= (m + kd + d)^d, exact in int64.
    # The (1 + d/(m+kd+1))^(-s) factors agree on both sides, so this check
    # covers every s at once.
    P = _partitions_upto(alpha_max, d)
    msum = P.sum(axis=1)
    dd = d ** d
    lhs_bound = dd * (alpha_max + k_max + 1) ** d
    rhs_bound = (alpha_max + k_max * d + d) ** d
    if max(lhs_bound, rhs_bound) >= 2 ** 62:
        raise ValueError("scan ranges exceed the exact int64 envelope")
    for k in range(k_max + 1):
        lhs = np.full(P.shape[0], dd, dtype=np.int64)
        for j in range(d):
            lhs *= P[:, j] + (k + 1)
        rhs = (msum + (k * d + d)) ** d
        bad = lhs > rhs
        checks += P.shape[0]
        if bad.any():
            idx = int(np.argmax(bad))
            violations.append(
                {
                    "check": "a",
                    "k": k,
                    "alpha": [int(x) for x in P[idx]],
                    "lhs": str(int(lhs[idx])),
                    "rhs": str(int(rhs[idx])),
                }
            )
        margins = rhs - lhs
        idx = int(np.argmin(margins))
        note_margin(
            float(margins[idx]) / float(rhs[idx]),
            Fraction(int(margins[idx]), int(rhs[idx])),
        )

    # --- (b): v_{k,r} = v_{k+l,t}, exact structural identity (s-independent:
    # rational parts and exponent bases match termwise)
    s0 = s_values[0]
    for k in range(k_max + 1):
        for r in range(alpha_max + 1):
            l, t = divmod(r, d)
            left = v_weight_sq_parts(d, s0, r, k)
            right = v_weight_sq_parts(d, s0, t, k + l)
            checks += 1
            if left != right:
                violations.append({"check": "b", "k": k, "r": r})

    # --- identity v_{k,0} = w_{k,0}
    for k in range(k_max + 1):
        checks += 1
        if v_weight_sq_parts(d, s0, 0, k) != hs_weight_sq_parts(d, s0, (0,) * d, k):
            violations.append({"check": "v0=w0", "k": k})

    for s in s_values:
        # --- (c): v_{k,r} <= v_{k,0} for s <= 0
        if s <= 0:
            for k in range(k_max + 1):
                R0, t0 = v_weight_sq_parts(d, s, 0, k)
                for r in range(1, alpha_max + 1):
                    R, t = v_weight_sq_parts(d, s, r, k)
                    checks += 1
                    if not rational_power_leq(R, t, R0, t0, s):
                        violations.append({"check": "c", "s": str(s), "k": k, "r": r})

        # --- (d): v_{k,r} <= u_k for 0 <= r <= d, s >= 0
        if s >= 0:
            for k in range(k_max + 1):
                Ru, tu = u_weight_sq_parts(d, s, k)
                for r in range(0, d + 1):
                    R, t = v_weight_sq_parts(d, s, r, k)
                    checks += 1
                    if not rational_power_leq(R, t, Ru, tu, s):
                        violations.append({"check": "d", "s": str(s), "k": k, "r": r})

        # --- direct Fraction cross-check of w_{k,alpha} <= w_{k,0} on small ranges
        if s <= 0 and s.denominator == 1:
            small_k = min(k_max, 12)
            small_a = min(alpha_max, 8)
            e = -s.numerator
            for k in range(small_k + 1):
                R0, t0 = hs_weight_sq_parts(d, s, (0,) * d, k)
                w0 = R0 * t0 ** e
                for alpha in _partitions_upto(small_a, d):
                    R, t = hs_weight_sq_parts(d, s, tuple(int(a) for a in alpha), k)
                    checks += 1
                    if R * t ** e > w0:
                        violations.append(
                            {"check": "w<=w0", "s": str(s), "k": k,
                             "alpha": [int(x) for x in alpha]}
                        )

    if inject_violation:
        violations.append(
            {"check": "injected", "k": 0, "alpha": [0] * d, "note": "negative control"}
        )

    ranges = {
        "d": d,
        "s": ",".join(str(x) for x in s_values),
        "k_max": k_max,
        "alpha_max": alpha_max,
    }
    worst_str = None
    if worst is not None:
        worst_str = str(worst)
    elif worst_float < math.inf:
        worst_str = repr(worst_float)
    return ScanReport("hs_shift_weights", ranges, checks, violations, worst_str)
