"""Univariate truncated Taylor series ``c_0 + c_1 t + ... + c_r t^r``.

A :class:`TruncatedSeries` of order ``r`` is a point of the algebra
``R[t]/(t^{r+1})``.  Evaluating a smooth function on series whose
coefficients are the jet coordinates ``x_0, ..., x_r`` of a curve returns the
Taylor coefficients of the composite, which is exactly the lift
``f^(lambda)`` used throughout :mod:`statlift.lifting`.
"""
from __future__ import annotations

import math
from numbers import Real

import numpy as np

from . import _kernels


class DomainError(ValueError):
    """An elementary function was applied outside its domain.

    ``value`` holds the offending constant term (or array of them).
    """

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class TruncatedSeries:
    """Immutable order-``r`` truncated power series."""

    __slots__ = ("_c",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must be a non-empty 1-D sequence")
        c.setflags(write=False)
        self._c = c

    @classmethod
    def constant(cls, value, order):
        c = np.zeros(order + 1)
        c[0] = value
        return cls(c)

    @classmethod
    def variable(cls, value, order):
        """The series ``value + t`` (a curve with unit velocity)."""
        c = np.zeros(order + 1)
        c[0] = value
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def order(self) -> int:
        return self._c.size - 1

    def __len__(self):
        return self._c.size

    def __getitem__(self, k):
        return self._c[k]

    def __iter__(self):
        return iter(self._c.tolist())

    def __repr__(self):
        return f"TruncatedSeries({self._c.tolist()})"

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self._c.shape == other._c.shape and bool(np.all(self._c == other._c))

    def __hash__(self):
        return hash(self._c.tobytes())

    def derivative_at_zero(self, k):
        """``d^k/dt^k`` of the represented function at ``t = 0``."""
        return math.factorial(k) * self._c[k]

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            if other.order != self.order:
                raise ValueError(
                    f"order mismatch: {self.order} vs {other.order}"
                )
            return other
        if isinstance(other, Real):
            return TruncatedSeries.constant(float(other), self.order)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return TruncatedSeries(self._c + other._c)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(-self._c)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return TruncatedSeries(self._c - other._c)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return TruncatedSeries(other._c - self._c)

    def __mul__(self, other):
        if isinstance(other, Real):
            return TruncatedSeries(self._c * float(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return series_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Real):
            if other == 0:
                raise DomainError("division by zero", 0.0)
            return TruncatedSeries(self._c / float(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return series_div(self, other)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return series_div(other, self)

    def __pow__(self, exponent):
        if isinstance(exponent, TruncatedSeries):
            out = series_transcendental("exp", exponent * series_transcendental("log", self)).coeffs.copy()
            out[0] = self._c[0] ** exponent._c[0]
            return TruncatedSeries(out)
        return series_transcendental("pow", self, exponent)

    def __rpow__(self, base):
        if not isinstance(base, Real) or base <= 0:
            raise DomainError("base of a series power must be a positive real", base)
        out = series_transcendental("exp", self * math.log(base)).coeffs.copy()
        out[0] = float(base) ** self._c[0]
        return TruncatedSeries(out)

    def exp(self):
        return series_transcendental("exp", self)

    def log(self):
        return series_transcendental("log", self)

    def sqrt(self):
        return series_transcendental("sqrt", self)


def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product ``c_k = sum_{j<=k} a_j b_{k-j}`` truncated at the order."""
    if a.order != b.order:
        raise ValueError(f"order mismatch: {a.order} vs {b.order}")
    return TruncatedSeries(_kernels.backend.cauchy(a.coeffs, b.coeffs))


def series_div(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    if a.order != b.order:
        raise ValueError(f"order mismatch: {a.order} vs {b.order}")
    if b.coeffs[0] == 0.0:
        raise DomainError("division by a series with zero constant term", 0.0)
    return TruncatedSeries(_kernels.backend.series_div(a.coeffs, b.coeffs))


def _integer_power(a: TruncatedSeries, n: int) -> TruncatedSeries:
    if n < 0:
        return _integer_power(TruncatedSeries.constant(1.0, a.order) / a, -n)
    result = TruncatedSeries.constant(1.0, a.order)
    base = a
    while n:
        if n & 1:
            result = series_mul(result, base)
        n >>= 1
        if n:
            base = series_mul(base, base)
    return result


def series_transcendental(kind: str, a: TruncatedSeries, alpha=None) -> TruncatedSeries:
    """Apply ``exp``, ``log``, ``sqrt`` or ``pow`` (with ``alpha``) to a series.

    Coefficients come from the first-order ODE each function satisfies, e.g.
    ``b' = a' b`` for ``b = exp(a)``; the result is exact to the series order.
    """
    c = a.coeffs
    k = _kernels.backend
    if kind == "exp":
        return TruncatedSeries(k.series_exp(c))
    if kind == "log":
        if not c[0] > 0:
            raise DomainError(f"log requires a positive constant term, got {c[0]!r}", c[0])
        return TruncatedSeries(k.series_log(c))
    if kind == "sqrt":
        if not c[0] > 0:
            raise DomainError(f"sqrt requires a positive constant term, got {c[0]!r}", c[0])
        return TruncatedSeries(k.series_pow(c, 0.5))
    if kind == "pow":
        if alpha is None:
            raise ValueError("pow needs an exponent")
        alpha = float(alpha)
        if alpha.is_integer() and abs(alpha) <= 64:
            return _integer_power(a, int(alpha))
        if not c[0] > 0:
            raise DomainError(
                f"non-integer power requires a positive constant term, got {c[0]!r}", c[0]
            )
        return TruncatedSeries(k.series_pow(c, alpha))
    raise ValueError(f"unknown function {kind!r}")
