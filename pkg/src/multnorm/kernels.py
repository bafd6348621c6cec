"""Unitarily invariant reproducing kernels on the unit ball.

A kernel is described by its coefficient sequence (a_n) through
K(z, w) = sum_n a_n <z, w>^n, where <z, w> is the Hermitian inner product
on C^d.  Supported families:

* ``szego``      1/(1 - z conj(w)) on the disc (d = 1),
* ``dirichlet``  (1 - <z,w>)^(-a) for a > 0, and the logarithmic kernel
                 (1/x) log(1/(1-x)) at a = 0 (x = <z,w>),
* ``hs``         sum (n+1)^s <z,w>^n,
* ``tau``        the pullback sequence a_n = (nd)! / (d^(nd) (n!)^d),
* ``custom``     an explicit finite coefficient list.

Monomial norms satisfy ||z^alpha||^2 = alpha! / (a_{|alpha|} |alpha|!) and are
available in exact rational arithmetic whenever the coefficients are rational.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from .poly import Poly

__all__ = [
    "KernelSpec",
    "KernelError",
    "TruncationError",
    "InvalidKernelError",
    "DominationRadiusError",
    "ExactArithmeticUnavailable",
    "as_point",
    "kernel_eval",
    "monomial_norm_sq",
    "monomial_norm_sq_exact",
    "gram",
    "delta_metric",
    "pseudohyperbolic",
    "reciprocal_coeffs",
    "domination_radius",
    "poly_norm_sq",
    "poly_norm_sq_exact",
]

SZEGO = "szego"
DIRICHLET = "dirichlet"
HS = "hs"
TAU = "tau"
CUSTOM = "custom"

_FAMILIES = (SZEGO, DIRICHLET, HS, TAU, CUSTOM)


class KernelError(Exception):
    pass


class TruncationError(KernelError):
    """Series tail could not be certified at the requested tolerance."""


class InvalidKernelError(KernelError):
    """Kernel violates a positivity assumption (e.g. K(z,z) <= 0)."""


class DominationRadiusError(KernelError):
    """No admissible radius above the configured floor."""


class ExactArithmeticUnavailable(KernelError):
    """Exact rational value requested for an irrational coefficient."""


# Incrementally grown exact coefficient tables, keyed by family parameters.
_EXACT_CACHE: dict = {}


def _exact_table(key, extend, n):
    table = _EXACT_CACHE.setdefault(key, [Fraction(1)])
    while len(table) <= n:
        table.append(extend(table, len(table)))
    return table[n]


@dataclass(frozen=True)
class KernelSpec:
    """Descriptor of a unitarily invariant kernel; immutable and hashable."""

    family: str
    d: int = 1
    a: Optional[Fraction] = None
    s: Optional[Fraction] = None
    coeffs: Optional[Tuple[Fraction, ...]] = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        if self.family == SZEGO and self.d != 1:
            raise ValueError("the Szego kernel lives on the disc (d = 1)")
        if self.family == DIRICHLET:
            a = Fraction(self.a)
            if a < 0:
                raise ValueError("dirichlet parameter must satisfy a >= 0")
            object.__setattr__(self, "a", a)
        if self.family == HS:
            object.__setattr__(self, "s", Fraction(self.s))
        if self.family == CUSTOM:
            if not self.coeffs:
                raise ValueError("custom kernel needs a coefficient list")
            cs = tuple(Fraction(c) for c in self.coeffs)
            if any(c <= 0 for c in cs):
                raise ValueError("custom coefficients must be positive")
            object.__setattr__(self, "coeffs", cs)

    # ------------------------------------------------------------- constructors

    @staticmethod
    def szego():
        return KernelSpec(SZEGO, 1)

    @staticmethod
    def dirichlet(a, d=1):
        return KernelSpec(DIRICHLET, d, a=Fraction(a))

    @staticmethod
    def hs(s, d=1):
        return KernelSpec(HS, d, s=Fraction(s))

    @staticmethod
    def tau_pullback(d):
        return KernelSpec(TAU, d)

    @staticmethod
    def custom(coeffs, d=1):
        return KernelSpec(CUSTOM, d, coeffs=tuple(coeffs))

    # ------------------------------------------------------------- coefficients

    @property
    def n_terms(self):
        """Number of stored coefficients (custom family only)."""
        return len(self.coeffs) if self.family == CUSTOM else None

    def coeff_exact(self, n):
        """a_n as a Fraction, or None when no exact form exists."""
        if n < 0:
            raise ValueError("n must be >= 0")
        if self.family == SZEGO:
            return Fraction(1)
        if self.family == DIRICHLET:
            a = self.a
            if a == 0:
                return Fraction(1, n + 1)
            return _exact_table(
                (DIRICHLET, a), lambda t, m: t[m - 1] * (a + m - 1) / m, n
            )
        if self.family == HS:
            if self.s.denominator != 1:
                return None
            e = self.s.numerator
            return Fraction((n + 1) ** e) if e >= 0 else Fraction(1, (n + 1) ** (-e))
        if self.family == TAU:
            d = self.d

            def extend(t, m):
                num = math.prod(range((m - 1) * d + 1, m * d + 1))
                return t[m - 1] * Fraction(num, (d * m) ** d)

            return _exact_table((TAU, d), extend, n)
        # custom
        if n >= len(self.coeffs):
            raise KernelError(f"custom kernel has no coefficient a_{n}")
        return self.coeffs[n]

    def coeff(self, n):
        """a_n as a float."""
        if self.family == SZEGO:
            return 1.0
        if self.family == DIRICHLET:
            a = float(self.a)
            if a == 0.0:
                return 1.0 / (n + 1)
            if n <= 2000:
                return float(self.coeff_exact(n))
            return math.exp(math.lgamma(a + n) - math.lgamma(n + 1) - math.lgamma(a))
        if self.family == HS:
            return float(n + 1) ** float(self.s)
        if self.family == TAU:
            if n * self.d <= 3000:
                return float(self.coeff_exact(n))
            d = self.d
            return math.exp(
                math.lgamma(n * d + 1) - n * d * math.log(d) - d * math.lgamma(n + 1)
            )
        return float(self.coeff_exact(n))

    def _ratio_cap(self, n):
        """Upper bound for a_{k+1}/a_k over all k >= n (series tail control)."""
        if self.family == DIRICHLET and self.a > 1:
            return (float(self.a) + n) / (n + 1)
        if self.family == HS and self.s > 0:
            return ((n + 2) / (n + 1)) ** float(self.s)
        return 1.0

    # ------------------------------------------------------------- evaluation

    def _closed_form(self, x):
        if self.family == SZEGO or (self.family == HS and self.s == 0):
            return 1.0 / (1.0 - x)
        if self.family == DIRICHLET:
            a = self.a
            if a > 0:
                return cmath.exp(-float(a) * cmath.log(1.0 - x))
            if abs(x) < 1e-6:
                # log(1/(1-x))/x by its series, avoiding 0/0
                return 1.0 + x / 2 + x * x / 3 + x ** 3 / 4 + x ** 4 / 5
            return -complex(np.log1p(-x)) / x
        return None

    def eval_scalar(self, x, tol=1e-14, max_terms=200000):
        """g(x) = sum a_n x^n with |x| < 1, via closed form or certified series."""
        x = complex(x)
        closed = self._closed_form(x)
        if closed is not None:
            return closed
        if self.family == CUSTOM:
            total = 0j
            xn = 1.0 + 0j
            for c in self.coeffs:
                total += float(c) * xn
                xn *= x
            return total
        if abs(x) >= 1.0:
            raise TruncationError(f"series evaluation needs |x| < 1, got {abs(x)}")
        total = 0j
        xn = 1.0 + 0j
        r = abs(x)
        for n in range(max_terms):
            term = self.coeff(n) * xn
            total += term
            q = self._ratio_cap(n + 1) * r
            if q < 1.0 and abs(term) * q / (1.0 - q) < tol:
                return total
            xn *= x
        raise TruncationError(
            f"series tail not certified below {tol} within {max_terms} terms"
        )

    # ------------------------------------------------------------- serialization

    def to_json_dict(self):
        out = {"family": self.family, "d": self.d}
        if self.a is not None:
            out["a"] = float(self.a)
        if self.s is not None:
            out["s"] = float(self.s)
        if self.coeffs is not None:
            out["coeffs"] = [float(c) for c in self.coeffs]
        return out

    @staticmethod
    def from_json_dict(obj):
        family = obj["family"]
        d = int(obj.get("d", 1))
        if family == SZEGO:
            return KernelSpec.szego()
        if family == DIRICHLET:
            return KernelSpec.dirichlet(Fraction(obj["a"]), d)
        if family == HS:
            return KernelSpec.hs(Fraction(obj["s"]), d)
        if family == TAU:
            return KernelSpec.tau_pullback(d)
        if family == CUSTOM:
            return KernelSpec.custom([Fraction(c) for c in obj["coeffs"]], d)
        raise ValueError(f"unknown kernel family {family!r}")


# ----------------------------------------------------------------- points


def as_point(z, d):
    """Coerce a scalar or sequence to a complex vector of length d."""
    pt = np.atleast_1d(np.asarray(z, dtype=complex))
    if pt.shape != (d,):
        raise ValueError(f"point of shape {pt.shape} for dimension {d}")
    return pt


def _check_interior(pt, what="point"):
    if np.linalg.norm(pt) >= 1.0:
        raise ValueError(f"{what} must lie in the open unit ball")


# ----------------------------------------------------------------- operations


def kernel_eval(k: KernelSpec, z, w, tol=1e-14):
    """K(z, w); Hermitian in (z, w)."""
    zp = as_point(z, k.d)
    wp = as_point(w, k.d)
    _check_interior(zp)
    _check_interior(wp)
    x = complex(np.sum(zp * np.conj(wp)))
    return k.eval_scalar(x, tol=tol)


def monomial_norm_sq(k: KernelSpec, alpha):
    """||z^alpha||^2 = alpha! / (a_n n!) with n = |alpha|."""
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != k.d or any(a < 0 for a in alpha):
        raise ValueError(f"bad multi-index {alpha!r} for dimension {k.d}")
    n = sum(alpha)
    exact = k.coeff_exact(n)
    if exact is not None:
        num = math.prod(math.factorial(a) for a in alpha)
        return float(Fraction(num) / (exact * math.factorial(n)))
    log_norm = (
        sum(math.lgamma(a + 1) for a in alpha)
        - math.lgamma(n + 1)
        - math.log(k.coeff(n))
    )
    return math.exp(log_norm)


def monomial_norm_sq_exact(k: KernelSpec, alpha):
    """Exact rational monomial norm; raises if a_n has no exact form."""
    alpha = tuple(int(a) for a in alpha)
    n = sum(alpha)
    exact = k.coeff_exact(n)
    if exact is None:
        raise ExactArithmeticUnavailable(
            f"no exact coefficient a_{n} for family {k.family!r}"
        )
    num = math.prod(math.factorial(a) for a in alpha)
    return Fraction(num) / (exact * math.factorial(n))


def poly_norm_sq(k: KernelSpec, f: Poly):
    """||f||^2 in the space of k, for a polynomial f."""
    if f.d != k.d:
        raise ValueError("polynomial dimension does not match kernel")
    return sum(abs(complex(c)) ** 2 * monomial_norm_sq(k, a) for a, c in f.items())


def poly_norm_sq_exact(k: KernelSpec, f: Poly):
    """Exact ||f||^2, requiring rational real coefficients."""
    total = Fraction(0)
    for alpha, c in f.items():
        if not isinstance(c, (int, Fraction)):
            raise ExactArithmeticUnavailable("polynomial has non-rational coefficients")
        total += Fraction(c) ** 2 * monomial_norm_sq_exact(k, alpha)
    return total


def gram(k: KernelSpec, pts):
    """Hermitian Gram matrix [K(z_i, z_j)]."""
    pts = [as_point(p, k.d) for p in pts]
    if not pts:
        raise ValueError("empty point list")
    n = len(pts)
    G = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            G[i, j] = kernel_eval(k, pts[i], pts[j])
            G[j, i] = np.conj(G[i, j])
    return G


def delta_metric(k: KernelSpec, z, w):
    """Kernel-induced pseudo-metric (1 - |K(z,w)|^2 / (K(z,z)K(w,w)))^(1/2)."""
    kzz = kernel_eval(k, z, z).real
    kww = kernel_eval(k, w, w).real
    if kzz <= 0 or kww <= 0:
        raise InvalidKernelError("kernel is not positive on the diagonal")
    kzw = kernel_eval(k, z, w)
    val = 1.0 - (abs(kzw) ** 2) / (kzz * kww)
    return math.sqrt(min(max(val, 0.0), 1.0))


def pseudohyperbolic(u, v):
    """Classical pseudohyperbolic distance |(u - v)/(1 - conj(v) u)| on the disc."""
    u = complex(u)
    v = complex(v)
    return abs((u - v) / (1.0 - v.conjugate() * u))


def reciprocal_coeffs(k: KernelSpec, N, exact=False):
    """Coefficients (b_n) of 1/g with g(x) = sum a_n x^n, through degree N.

    Uses the convolution recurrence b_0 = 1, b_n = -sum_{j=1..n} a_j b_{n-j}
    (one-variable restriction; requires a_0 = 1).
    """

    def a(n):
        if k.family == CUSTOM and n >= len(k.coeffs):
            return Fraction(0) if exact else 0.0
        return k.coeff_exact(n) if exact else k.coeff(n)

    a0 = a(0)
    if a0 != 1:
        raise InvalidKernelError("reciprocal series requires a_0 = 1")
    if exact and k.coeff_exact(0) is None:
        raise ExactArithmeticUnavailable(f"family {k.family!r} has no exact coefficients")
    b = [Fraction(1) if exact else 1.0]
    for n in range(1, N + 1):
        acc = sum(a(j) * b[n - j] for j in range(1, n + 1))
        b.append(-acc)
    return b


def domination_radius(k: KernelSpec, N, floor=1e-4, grid_step=1e-3, refine=1e-6):
    """Largest grid radius r with all partial sums sum_{j<=n} b_j r^j >= 0, n <= N.

    At such r the Schur-product comparison S(z,w)/K(rz,rw) is positive
    semidefinite at truncation order N.  Scans a descending grid from
    1 - grid_step and refines the boundary by bisection to ``refine``.
    """
    b = np.asarray(reciprocal_coeffs(k, N), dtype=float)

    def admissible(r):
        powers = r ** np.arange(N + 1)
        return bool(np.all(np.cumsum(b * powers) >= 0.0))

    top = 1.0 - grid_step
    if admissible(top):
        return top
    r = top - grid_step
    while r >= floor:
        if admissible(r):
            lo, hi = r, r + grid_step
            while hi - lo > refine:
                mid = 0.5 * (lo + hi)
                if admissible(mid):
                    lo = mid
                else:
                    hi = mid
            return lo
        r -= grid_step
    raise DominationRadiusError(
        f"no admissible radius above {floor} at truncation {N}"
    )
