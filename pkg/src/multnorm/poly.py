"""Sparse polynomials in d complex variables, indexed by multi-indices.

A polynomial is a finite map alpha -> coefficient with alpha in N_0^d.
Coefficients may be ints, Fractions or complex floats; explicit zeros are
never stored.  Exact-arithmetic helpers elsewhere require real rational
coefficients, everything else works with complex floats.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

__all__ = ["Poly"]


def _as_index(alpha, d):
    if isinstance(alpha, int):
        alpha = (alpha,)
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != d or any(a < 0 for a in alpha):
        raise ValueError(f"bad multi-index {alpha!r} for dimension {d}")
    return alpha


class Poly:
    """Finite formal sum  sum_alpha c(alpha) z^alpha."""

    __slots__ = ("d", "coeffs")

    def __init__(self, d, coeffs=None):
        self.d = int(d)
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        table = {}
        if coeffs:
            for alpha, c in coeffs.items():
                alpha = _as_index(alpha, self.d)
                if c != 0:
                    table[alpha] = table.get(alpha, 0) + c
                    if table[alpha] == 0:
                        del table[alpha]
        self.coeffs = table

    # ---------------------------------------------------------------- constructors

    @classmethod
    def constant(cls, value, d=1):
        return cls(d, {(0,) * d: value})

    @classmethod
    def coordinate(cls, i, d=1):
        alpha = [0] * d
        alpha[i] = 1
        return cls(d, {tuple(alpha): 1})

    @classmethod
    def one_var(cls, coeff_list):
        """Univariate polynomial from an ascending coefficient list."""
        return cls(1, {(k,): c for k, c in enumerate(coeff_list)})

    @classmethod
    def monomial(cls, alpha, value=1):
        alpha = tuple(alpha)
        return cls(len(alpha), {alpha: value})

    # ---------------------------------------------------------------- basic queries

    def degree(self):
        return max((sum(a) for a in self.coeffs), default=0)

    def is_zero(self):
        return not self.coeffs

    def __getitem__(self, alpha):
        return self.coeffs.get(_as_index(alpha, self.d), 0)

    def items(self):
        return self.coeffs.items()

    def univariate_coeffs(self):
        """Ascending dense coefficient list; requires d == 1."""
        if self.d != 1:
            raise ValueError("univariate_coeffs requires d == 1")
        out = [0] * (self.degree() + 1)
        for (k,), c in self.coeffs.items():
            out[k] = c
        return out

    # ---------------------------------------------------------------- arithmetic

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.d != self.d:
                raise ValueError("dimension mismatch")
            return other
        return Poly.constant(other, self.d)

    def __add__(self, other):
        other = self._coerce(other)
        table = dict(self.coeffs)
        for alpha, c in other.coeffs.items():
            table[alpha] = table.get(alpha, 0) + c
        return Poly(self.d, table)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.d, {a: -c for a, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return Poly(self.d, {a: c * other for a, c in self.coeffs.items()})
        if other.d != self.d:
            raise ValueError("dimension mismatch")
        table = {}
        for a1, c1 in self.coeffs.items():
            for a2, c2 in other.coeffs.items():
                beta = tuple(x + y for x, y in zip(a1, a2))
                table[beta] = table.get(beta, 0) + c1 * c2
        return Poly(self.d, table)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power")
        out = Poly.constant(1, self.d)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def __eq__(self, other):
        return isinstance(other, Poly) and self.d == other.d and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.d, frozenset(self.coeffs.items())))

    # ---------------------------------------------------------------- evaluation

    def __call__(self, point):
        """Evaluate at a point (complex scalar for d == 1, vector otherwise)."""
        z = np.atleast_1d(np.asarray(point, dtype=complex))
        if z.shape != (self.d,):
            raise ValueError(f"point of shape {z.shape} for dimension {self.d}")
        total = 0j
        for alpha, c in self.coeffs.items():
            term = complex(c)
            for zi, ai in zip(z, alpha):
                if ai:
                    term *= zi ** ai
            total += term
        return total

    # ---------------------------------------------------------------- reshaping

    def extend_dims(self, d):
        """Reinterpret in d >= self.d variables by appending zero exponents."""
        if d < self.d:
            raise ValueError("cannot shrink dimension")
        pad = (0,) * (d - self.d)
        return Poly(d, {alpha + pad: c for alpha, c in self.coeffs.items()})

    def map_coeffs(self, fn):
        return Poly(self.d, {a: fn(c) for a, c in self.coeffs.items()})

    def conjugate(self):
        def conj(c):
            if isinstance(c, (int, Fraction)):
                return c
            return complex(c).conjugate()

        return self.map_coeffs(conj)

    def __repr__(self):
        if not self.coeffs:
            return f"Poly({self.d}, 0)"
        parts = [f"{c!r}*z^{a}" for a, c in sorted(self.coeffs.items())]
        return f"Poly({self.d}, {' + '.join(parts)})"
