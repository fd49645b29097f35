"""Lifts of functions, fields, tensors, connections and contrasts to ``T^r M``.

A point of ``T^r M`` has coordinates ``x^i_λ`` with the curve convention
``x^i(γ(s)) = Σ_λ x^i_λ s^λ``.  Every lift is computed the same way: the
base object is evaluated on the curve jets (an extra univariate block of
order ``r`` appended to whatever algebra the lifted coordinates live in) and
the ``s^λ`` coefficients ``K^(λ)`` are read off.  Component rules, with
``K^(p) = 0`` for ``p < 0`` and ``∂_(i,a) = ∂/∂x^i_a``:

* function: ``f^(λ)``
* vector field, λ-lift: component ``(i, ν)`` is ``(X^i)^(ν+λ-r)``
* one-form, λ-lift: component ``(i, ν)`` is ``(ω_i)^(λ-ν)``
* type ``(u, p)`` tensor, λ-lift: ``(K^{l..}_{i..})^(λ - r u + Σ d - Σ a)``
  for upper levels ``d`` and lower levels ``a``
* connection: ``Γ~^(k,c)_(i,a)(j,b) = (Γ^k_ij)^(c-a-b)``
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .contrast import ContrastFunction
from .expr import SmoothMap
from .geometry import (
    Chart,
    Connection,
    CovariantTensor,
    Field,
    Metric,
    OneForm,
    ScalarField,
    TangentChart,
    TensorField,
    VectorField,
)
from .jet import Jet
from .statistical import StatisticalStructure


@dataclass(frozen=True)
class JetPoint:
    """A point of ``T^r M``: ``coords[λ n + i] = x^i_λ``."""

    chart: TangentChart
    coords: tuple

    @classmethod
    def from_blocks(cls, chart: TangentChart, blocks):
        b = np.asarray(blocks, dtype=float)
        if b.shape != (chart.r + 1, chart.base.dim):
            raise ValueError(f"expected blocks of shape {(chart.r + 1, chart.base.dim)}, got {b.shape}")
        chart.base.check(b[0])
        return cls(chart, tuple(b.reshape(-1).tolist()))

    def __post_init__(self):
        if len(self.coords) != self.chart.dim:
            raise ValueError(f"expected {self.chart.dim} coordinates, got {len(self.coords)}")

    def block(self, lam: int) -> np.ndarray:
        n = self.chart.base.dim
        return np.asarray(self.coords[lam * n:(lam + 1) * n])

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.coords)


def curve_jets(X: Jet, n: int, r: int) -> Jet:
    """Base coordinates along the curve, ``x^i(s) = Σ_λ X[λ n + i] s^λ``.

    The result lives in ``X.alg`` extended by a univariate block of order ``r``.
    """
    alg = X.alg.extend(1, r)
    batch = X.shape[:-1]
    c = X.c.reshape(batch + (r + 1, n, X.alg.size))
    c = np.moveaxis(c, -3, -1)  # (n, base size, r+1)
    return Jet(alg, np.ascontiguousarray(c).reshape(batch + (n, alg.size)))


def lift_coefficients(field, X: Jet, r: int) -> Jet:
    """``K^(λ)`` for ``λ = 0..r`` along the last axis, in ``X``'s algebra."""
    n = field.chart.dim
    return field(curve_jets(X, n, r)).last_block()


def _tangent(chart: Chart, r: int) -> TangentChart:
    if r < 1:
        raise ValueError("tangent order r must be at least 1")
    return chart.tangent(r)


def _as_scalar(f, chart):
    if isinstance(f, Field):
        return f
    if chart is None:
        raise ValueError("a chart is needed to lift a bare expression")
    if isinstance(f, str):
        f = SmoothMap.parse(f, chart.names)
    return ScalarField.from_components(chart, f)


@lru_cache(maxsize=None)
def _gather(n: int, r: int, upper: int, lower: int, lam: int):
    """Flat gather index from ``(..., n^m * (r+1))`` coefficients (plus one
    trailing zero slot) to the ``(N,)*m`` lifted components."""
    m = upper + lower
    N = n * (r + 1)
    zero = n**m * (r + 1)
    out = np.full((N,) * m, zero, dtype=np.int64)
    for idx in np.ndindex(*((N,) * m)):
        levels = [k // n for k in idx]
        base = [k % n for k in idx]
        e = lam - r * upper + sum(levels[:upper]) - sum(levels[upper:])
        if 0 <= e <= r:
            flat = 0
            for b in base:
                flat = flat * n + b
            out[idx] = flat * (r + 1) + e
    return out


def _lift_components(field: Field, lam: int, r: int, upper: int):
    n = field.chart.dim
    m = len(field.shape)
    idx = _gather(n, r, upper, m - upper, lam)

    def fn(X):
        coef = lift_coefficients(field, X, r)
        batch = X.shape[:-1]
        flat = coef.reshape(batch + (n**m * (r + 1),))
        flat = Jet.concatenate([flat, Jet.constant(np.zeros(batch + (1,)), X.alg)], axis=-1)
        return flat[(Ellipsis, idx)]

    return fn


def lift_function(f, lam: int, r: int, chart: Chart | None = None) -> ScalarField:
    """``f^(λ)``: coefficient ``λ`` of ``f`` along curve jets (zero for ``λ < 0``)."""
    f = _as_scalar(f, chart)
    tc = _tangent(f.chart, r)
    if lam > r:
        raise ValueError(f"lift index {lam} exceeds the order {r}")
    if lam < 0:
        return ScalarField(tc, lambda X: Jet.constant(np.zeros(X.shape[:-1]), X.alg), f"{f.label}^({lam})")
    return ScalarField(tc, lambda X: lift_coefficients(f, X, r)[..., lam], f"{f.label}^({lam})")


def _check_lam(lam, r):
    if not 0 <= lam <= r:
        raise ValueError(f"lift index must satisfy 0 <= λ <= {r}, got {lam}")


def lift_vector_field(X: VectorField, lam: int, r: int) -> VectorField:
    _check_lam(lam, r)
    return VectorField(_tangent(X.chart, r), _lift_components(X, lam, r, 1), f"{X.label}^({lam})")


def lift_one_form(w: OneForm, lam: int, r: int) -> OneForm:
    _check_lam(lam, r)
    return OneForm(_tangent(w.chart, r), _lift_components(w, lam, r, 0), f"{w.label}^({lam})")


def lift_tensor(K: Field, lam: int, r: int) -> TensorField:
    """λ-lift of a type ``(K.upper, K.lower)`` tensor field."""
    _check_lam(lam, r)
    tc = _tangent(K.chart, r)
    fn = _lift_components(K, lam, r, K.upper)
    return TensorField(tc, fn, K.upper, K.lower, f"{K.label}^({lam})", getattr(K, "symmetric", False))


def lift_covariant_tensor(K: CovariantTensor, lam: int, r: int) -> CovariantTensor:
    """λ-lift of a ``(0, p)`` tensor; the complete lift (``λ = r``) of a metric is a metric."""
    if K.upper:
        raise ValueError("expected a covariant tensor")
    _check_lam(lam, r)
    tc = _tangent(K.chart, r)
    fn = _lift_components(K, lam, r, 0)
    if isinstance(K, Metric) and lam == r:
        return Metric(tc, fn, f"{K.label}^c")
    return CovariantTensor(tc, fn, K.lower, f"{K.label}^({lam})", getattr(K, "symmetric", False))


def lift_connection(nabla: Connection, r: int) -> Connection:
    """The complete lift ``∇^c``: ``Γ~^(k,c)_(i,a)(j,b) = (Γ^k_ij)^(c-a-b)``."""
    tc = _tangent(nabla.chart, r)
    return Connection(tc, _lift_components(nabla, r, r, 1), f"{nabla.label}^c")


def lift_contrast(F: ContrastFunction, r: int) -> ContrastFunction:
    """``F^c`` on ``T^r M``: coefficient ``r`` of ``F`` along the pair of curve jets."""
    tc = _tangent(F.chart, r)
    n = F.chart.dim

    def fn(X, Y):
        val = F(curve_jets(X, n, r), curve_jets(Y, n, r))
        return val.last_block()[..., r]

    return ContrastFunction(tc, fn, f"({F.label})^c")


def tangent_manifold(s: StatisticalStructure, r: int) -> StatisticalStructure:
    """``(T^r M, g^c, T^c)``; the result can be lifted again."""
    return StatisticalStructure(
        lift_covariant_tensor(s.g, r, r), lift_covariant_tensor(s.T, r, r), f"{s.label}^c"
    )


def sample_jets(chart: TangentChart, count: int, seed: int = 0) -> np.ndarray:
    """Seeded points of ``T^r M``: base block inside the base domain, higher blocks in the velocity box."""
    return chart.sample(count, seed)
