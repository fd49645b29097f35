"""Contrast functions on ``M x M`` and the structures induced on the diagonal.

With ``F(x, y)`` and all derivatives taken at ``y = x``:

* ``g_ij = -∂x_i ∂y_j F``
* ``Γ_ijk = -∂x_i ∂x_j ∂y_k F``, raised on ``k`` (the induced connection)
* ``Γ*_ijk = -∂y_i ∂y_j ∂x_k F`` (the same rule applied to the swapped function)
* ``T_ijk = ∂x_i ∂y_j ∂y_k (F - F*)``

These satisfy ``Γ - Γ* = T`` after lowering, so ``∇*`` plays the role of the
``α = +1`` connection of ``(g, T)`` and ``∇`` that of ``α = -1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .expr import SmoothMap
from .geometry import Chart, Connection, CovariantTensor, Metric, einsum, inverse
from .jet import Jet, as_point_jet, taylor_partials
from .statistical import StatisticalStructure


class ContrastFunction:
    """``F(x, y)`` on a chart; ``fn`` maps two coordinate jets to a scalar jet."""

    def __init__(self, chart: Chart, fn, label: str = ""):
        self.chart = chart
        self.fn = fn
        self.label = label

    @classmethod
    def from_expression(cls, chart: Chart, text: str, line: int = 1, col: int = 1):
        """Parse ``text`` in the variables ``<name>_x`` and ``<name>_y``."""
        names = [f"{v}_x" for v in chart.names] + [f"{v}_y" for v in chart.names]
        return cls.from_smooth_map(chart, SmoothMap.parse(text, names, line, col))

    @classmethod
    def from_smooth_map(cls, chart: Chart, body: SmoothMap, label: str = ""):
        n = chart.dim
        if body.arity != 2 * n:
            raise ValueError(f"a contrast body needs {2 * n} arguments, got {body.arity}")

        def fn(x, y):
            return body(*(x[..., i] for i in range(n)), *(y[..., i] for i in range(n)))

        obj = cls(chart, fn, label or str(body))
        obj.body = body
        return obj

    def __call__(self, x, y) -> Jet:
        x, y = as_point_jet(x), as_point_jet(y)
        if x.alg is not y.alg:
            alg = x.alg if len(x.alg.blocks) >= len(y.alg.blocks) else y.alg
            x, y = x.embed(alg), y.embed(alg)
        out = Jet.coerce(self.fn(x, y), x.alg)
        shape = np.broadcast_shapes(x.shape[:-1], y.shape[:-1])
        return out if out.shape == shape else out.broadcast_to(shape)

    def evaluate(self, x, y) -> np.ndarray:
        return np.asarray(self(np.asarray(x, float), np.asarray(y, float)).value)

    def __repr__(self):
        return f"ContrastFunction({self.chart!r}, {self.label!r})"


def swap_contrast(F: ContrastFunction) -> ContrastFunction:
    """``F*(x, y) = F(y, x)``."""
    if getattr(F, "_swapped_from", None) is not None:
        return F._swapped_from
    G = ContrastFunction(F.chart, lambda x, y: F.fn(y, x), f"swap({F.label})")
    G._swapped_from = F
    return G


def diagonal_partials(F: ContrastFunction, x, degree: int):
    """Partials of ``(x, y) -> F`` at ``y = x`` up to ``degree``; variables ``x`` then ``y``."""
    x = as_point_jet(x)
    n = F.chart.dim
    z = Jet.concatenate([x, x], axis=-1)
    return taylor_partials(lambda w: F(w[..., :n], w[..., n:]), z, degree)


def _metric_from(h, n):
    return -h[..., :n, n:]


def induced_metric(F: ContrastFunction, point=None):
    n = F.chart.dim

    def fn(x):
        return _metric_from(diagonal_partials(F, x, 2)[2], n)

    g = Metric(F.chart, fn, "induced_metric")
    return g if point is None else g.at(point)


def _lowered_connection(d3, n):
    return -d3[..., :n, :n, n:]


def induced_connection(F: ContrastFunction, point=None):
    """``(Γ^F)^l_ij = -∂x_i ∂x_j ∂y_k F · (g^F)^{kl}``."""
    n = F.chart.dim

    def fn(x):
        _, _, h, d3 = diagonal_partials(F, x, 3)
        return einsum("...lk,...ijk->...lij", inverse(_metric_from(h, n), x), _lowered_connection(d3, n))

    nabla = Connection(F.chart, fn, "induced_connection")
    return nabla if point is None else nabla.at(point)


def induced_dual_connection(F: ContrastFunction, point=None):
    nabla = induced_connection(swap_contrast(F))
    nabla.label = "induced_dual_connection"
    return nabla if point is None else nabla.at(point)


def _skewness_from(d3, n):
    return d3[..., :n, n:, n:] - d3[..., n:, :n, :n]


def induced_skewness(F: ContrastFunction, point=None):
    """``T^F_ijk = ∂x_i ∂y_j ∂y_k (F - F*)`` on the diagonal."""
    n = F.chart.dim

    def fn(x):
        return _skewness_from(diagonal_partials(F, x, 3)[3], n)

    T = CovariantTensor(F.chart, fn, 3, "induced_skewness", symmetric=True)
    return T if point is None else T.at(point)


def contrast_structure(F: ContrastFunction) -> StatisticalStructure:
    """``(g^F, T^F)``; its ``α = -1`` and ``α = +1`` connections are ``∇^F`` and ``∇^{F*}``."""
    return StatisticalStructure(induced_metric(F), induced_skewness(F), "contrast")


def induced_all(F: ContrastFunction, points) -> dict:
    """All induced objects at ``points`` from a single third-order expansion."""
    n = F.chart.dim
    p = F.chart.check(points)
    _, _, h, d3 = diagonal_partials(F, Jet.constant(p), 3)
    h, d3 = np.asarray(h.value), np.asarray(d3.value)
    g = -h[..., :n, n:]
    ginv = np.asarray(inverse(Jet.constant(g)).value)
    low = -d3[..., :n, :n, n:]
    low_star = -d3[..., n:, n:, :n]
    return {
        "metric": g,
        "connection": np.einsum("...lk,...ijk->...lij", ginv, low),
        "dual_connection": np.einsum("...lk,...ijk->...lij", ginv, low_star),
        "skewness": d3[..., :n, n:, n:] - d3[..., n:, :n, :n],
    }


@dataclass
class ContrastReport:
    max_value: float
    max_gradient: float
    min_det: float
    points: int
    tolerance: float = 1e-10
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return (
            self.max_value <= self.tolerance
            and self.max_gradient <= self.tolerance
            and self.min_det >= self.tolerance
        )

    def __bool__(self):
        return self.passed

    def as_dict(self) -> dict:
        return {
            "name": "contrast",
            "max_value": self.max_value,
            "max_gradient": self.max_gradient,
            "min_det": self.min_det,
            "points": self.points,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "details": self.details,
        }


def validate_contrast(F: ContrastFunction, points, tol: float = 1e-10) -> ContrastReport:
    """Vanishing of ``F`` and its first jet on the diagonal, and nondegeneracy of ``g^F``.

    ``min_det`` is ``|det g^F|`` divided by ``max(1, max|g^F|)^n``.
    """
    n = F.chart.dim
    p = F.chart.check(points).reshape(-1, n)
    val, grad, h = diagonal_partials(F, Jet.constant(p), 2)
    g = -np.asarray(h.value)[..., :n, n:]
    scale = np.maximum(1.0, np.max(np.abs(g), axis=(-1, -2)))
    det = np.abs(np.linalg.det(g)) / scale**n
    hv = np.asarray(h.value)
    sym = max(
        float(np.max(np.abs(hv[..., :n, :n] - g))),
        float(np.max(np.abs(hv[..., n:, n:] - g))),
    )
    return ContrastReport(
        float(np.max(np.abs(val.value))),
        float(np.max(np.abs(grad.value))),
        float(np.min(det)),
        len(p),
        tol,
        {"second_derivative_mismatch": sym},
    )
