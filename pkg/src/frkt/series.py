"""Truncated power series with complex coefficients."""
import cmath

import numpy as np

from .errors import DomainError


class SeriesPoly:
    """sum_{j<=J} c_j (s - center)^j, closed under arithmetic at order J."""

    def __init__(self, coefficients, center=0j):
        self.coefficients = np.array(coefficients, dtype=complex)
        self.center = complex(center)

    @property
    def order(self):
        return len(self.coefficients) - 1

    def __len__(self):
        return len(self.coefficients)

    def __getitem__(self, j):
        if j < 0 or j > self.order:
            return 0j
        return complex(self.coefficients[j])

    def __repr__(self):
        return f"SeriesPoly({self.coefficients!r}, center={self.center!r})"

    def _new(self, c):
        return SeriesPoly(c, self.center)

    def _coerce(self, other):
        if isinstance(other, SeriesPoly):
            n = min(len(self), len(other))
            return self.coefficients[:n], other.coefficients[:n]
        c = np.zeros_like(self.coefficients)
        c[0] = other
        return self.coefficients, c

    def __add__(self, other):
        a, b = self._coerce(other)
        return self._new(a + b)

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.coefficients)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, SeriesPoly):
            return self._new(self.coefficients * other)
        a, b = self._coerce(other)
        return self._new(np.convolve(a, b)[: len(a)])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, SeriesPoly):
            return self._new(self.coefficients / other)
        a, b = self._coerce(other)
        if b[0] == 0:
            raise DomainError("series division by a series with zero constant term")
        q = np.zeros_like(a)
        for n in range(len(a)):
            q[n] = (a[n] - np.dot(q[:n], b[n:0:-1])) / b[0]
        return self._new(q)

    def __rtruediv__(self, other):
        one = np.zeros_like(self.coefficients)
        one[0] = other
        return self._new(one) / self

    def __pow__(self, z):
        return (self.log() * complex(z)).exp()

    def exp(self):
        a = self.coefficients
        b = np.zeros_like(a)
        b[0] = cmath.exp(a[0])
        k = np.arange(len(a))
        for n in range(1, len(a)):
            b[n] = np.dot(k[1 : n + 1] * a[1 : n + 1], b[n - 1 :: -1][:n]) / n
        return self._new(b)

    def log(self):
        """Principal logarithm; the constant term must be non-zero."""
        b = self.coefficients
        if b[0] == 0:
            raise DomainError("log of a series with zero constant term")
        a = np.zeros_like(b)
        a[0] = cmath.log(b[0])
        for n in range(1, len(b)):
            k = np.arange(1, n)
            a[n] = (n * b[n] - np.dot(k * a[1:n], b[n - 1 : 0 : -1])) / (n * b[0])
        return self._new(a)

    def derivative(self):
        c = self.coefficients
        return self._new(np.append(c[1:] * np.arange(1, len(c)), 0))

    def __call__(self, s):
        return complex(np.polynomial.polynomial.polyval(complex(s) - self.center, self.coefficients))

    def allclose(self, other, tol):
        return bool(np.max(np.abs(self.coefficients - other.coefficients)) <= tol)

