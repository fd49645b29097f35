"""Built-in statistical models.

``DensityModel`` integrates over a one-dimensional sample space with
Gauss-Legendre quadrature on ``[c - w s, c + w s]``, where ``c`` and ``s``
are a centre and a spread computed from the (real part of the) parameters.
Nodes depend only on real parameter values, so jet derivatives pass under
the fixed-node sum exactly; the truncation error is that of the quadrature.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .contrast import ContrastFunction
from .expr import SmoothMap
from .geometry import Chart, CoordinateMap, CovariantTensor, Metric, ScalarField
from .jet import Jet, einsum, taylor_partials, value_and_jacobian
from .statistical import StatisticalStructure


class NormalizationError(ValueError):
    def __init__(self, mass, point=None):
        super().__init__(f"density integrates to {mass!r} instead of 1" + ("" if point is None else f" at {point}"))
        self.mass = mass
        self.point = point


NORMALIZATION_TOL = 1e-8


@lru_cache(maxsize=None)
def gauss_legendre(nodes: int):
    t, w = np.polynomial.legendre.leggauss(nodes)
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


def tree_sum(a: Jet, axis: int = -1) -> Jet:
    """Pairwise summation along ``axis`` with a fixed, shape-determined order."""
    axis = axis + a.ndim if axis < 0 else axis
    c = np.moveaxis(a.c, axis, 0)
    while c.shape[0] > 1:
        if c.shape[0] % 2:
            c = np.concatenate([c, np.zeros((1,) + c.shape[1:])])
        c = c[0::2] + c[1::2]
    return Jet(a.alg, c[0])


class DensityModel:
    """Parametric densities ``p(ξ; x)`` on the real line.

    Give ``density`` or ``log_density`` as a SmoothMap (or expression) in
    ``(sample, *chart.names)``; the log form avoids ``log(exp(.))`` round
    trips and is preferred when both are available.
    """

    def __init__(
        self,
        chart: Chart,
        density=None,
        log_density=None,
        center=None,
        scale=None,
        nodes: int = 200,
        window: float = 12.0,
        sample: str = "xi",
    ):
        names = (sample,) + chart.names
        if density is None and log_density is None:
            raise ValueError("a density model needs a density or a log-density")
        self.chart = chart
        self.sample = sample
        self.density = _smooth(density, names)
        self.log_density = _smooth(log_density, names)
        self.center = _smooth(center if center is not None else "0", chart.names)
        self.scale = _smooth(scale if scale is not None else "1", chart.names)
        if nodes < 2:
            raise ValueError("quadrature needs at least two nodes")
        if not window > 0:
            raise ValueError("window half-width must be positive")
        self.nodes = int(nodes)
        self.window = float(window)

    def with_quadrature(self, nodes=None, window=None) -> "DensityModel":
        m = object.__new__(DensityModel)
        m.__dict__.update(self.__dict__)
        if nodes is not None:
            m.nodes = int(nodes)
        if window is not None:
            m.window = float(window)
        return m

    # -- quadrature ----------------------------------------------------------

    def interval(self, x0) -> tuple[np.ndarray, np.ndarray]:
        x0 = np.asarray(x0, dtype=float)
        args = [x0[..., i] for i in range(self.chart.dim)]
        c = np.broadcast_to(np.asarray(self.center(*args), dtype=float), x0.shape[:-1])
        s = np.broadcast_to(np.asarray(self.scale(*args), dtype=float), x0.shape[:-1])
        if np.any(~(s > 0)):
            raise ValueError("quadrature scale must be positive")
        return c - self.window * s, c + self.window * s

    def quadrature(self, lo, hi):
        t, w = gauss_legendre(self.nodes)
        mid = 0.5 * (np.asarray(hi) + np.asarray(lo))
        half = 0.5 * (np.asarray(hi) - np.asarray(lo))
        return mid[..., None] + half[..., None] * t, half[..., None] * w

    def nodes_at(self, *x0s):
        """Nodes and weights covering the windows of every point in ``x0s``."""
        los, his = zip(*(self.interval(x) for x in x0s))
        return self.quadrature(np.minimum.reduce(los), np.maximum.reduce(his))

    def log_p(self, x: Jet, xi: np.ndarray) -> Jet:
        """``log p(ξ_q; x)`` with shape ``x.shape[:-1] + (Q,)``."""
        args = [x[..., i].expand_dims(-1) for i in range(self.chart.dim)]
        if self.log_density is not None:
            out = self.log_density(xi, *args)
        else:
            p = self.density(xi, *args)
            out = p.log() if isinstance(p, Jet) else np.log(p)
        out = Jet.coerce(out, x.alg)
        shape = x.shape[:-1] + xi.shape[-1:]
        return out if out.shape == shape else out.broadcast_to(shape)

    def check_normalized(self, x0, tol: float = NORMALIZATION_TOL):
        x0 = np.asarray(x0, dtype=float)
        xi, w = self.nodes_at(x0)
        lp = np.asarray(self.log_p(Jet.constant(x0), xi).value)
        mass = np.asarray(tree_sum(Jet.constant(np.exp(lp) * w)).value)
        err = np.abs(mass - 1.0)
        if np.any(err > tol):
            k = np.unravel_index(int(np.argmax(err)), err.shape)
            raise NormalizationError(float(mass[k]), x0[k].tolist())
        return mass

    def _weighted_scores(self, x: Jet):
        x0 = np.asarray(x.value)
        self.check_normalized(x0)
        xi, w = self.nodes_at(x0)
        lp, score = value_and_jacobian(lambda z: self.log_p(z, xi), x)
        pw = lp.exp() * w
        return pw, score

    # -- information geometry -----------------------------------------------

    def fisher_rao(self, point=None):
        """``g_jk = ∫ p ∂_j log p ∂_k log p dξ``."""

        def fn(x):
            pw, score = self._weighted_scores(x)
            a = score * pw.expand_dims(-1)
            return tree_sum(einsum("...qj,...qk->...qjk", a, score), axis=-3)

        g = Metric(self.chart, fn, "fisher_rao")
        return g if point is None else g.at(point)

    def amari_chentsov(self, point=None):
        """``T_jkl = ∫ p ∂_j log p ∂_k log p ∂_l log p dξ``."""

        def fn(x):
            pw, score = self._weighted_scores(x)
            a = einsum("...qj,...qk->...qjk", score * pw.expand_dims(-1), score)
            return tree_sum(einsum("...qjk,...ql->...qjkl", a, score), axis=-4)

        T = CovariantTensor(self.chart, fn, 3, "amari_chentsov", symmetric=True)
        return T if point is None else T.at(point)

    def structure(self) -> StatisticalStructure:
        return StatisticalStructure(self.fisher_rao(), self.amari_chentsov(), "density")

    def kl_contrast(self) -> ContrastFunction:
        """``F(x, y) = ∫ p(ξ; x) log(p(ξ; x) / p(ξ; y)) dξ`` on the union of both windows."""

        def fn(x, y):
            x0, y0 = np.asarray(x.value), np.asarray(y.value)
            self.check_normalized(x0)
            self.check_normalized(y0)
            xi, w = self.nodes_at(x0, y0)
            lx = self.log_p(x, xi)
            ly = self.log_p(y, xi)
            return tree_sum(lx.exp() * (lx - ly) * w, axis=-1)

        return ContrastFunction(self.chart, fn, "kl")


def fisher_rao(model: DensityModel, point=None):
    return model.fisher_rao(point)


def amari_chentsov(model: DensityModel, point=None):
    return model.amari_chentsov(point)


def kl_contrast(model: DensityModel) -> ContrastFunction:
    return model.kl_contrast()


def _smooth(item, names):
    if item is None or isinstance(item, SmoothMap):
        return item
    return SmoothMap.parse(str(item), names)


# ---------------------------------------------------------------------------
# exponential families


class ExponentialFamily:
    """Hessian structure of a potential: ``g = ∂²ψ``, ``T = ∂³ψ``."""

    def __init__(self, chart: Chart, psi):
        self.chart = chart
        self.psi = psi if isinstance(psi, ScalarField) else ScalarField.from_components(chart, _smooth(psi, chart.names))

    def metric(self) -> Metric:
        return Metric(self.chart, lambda x: taylor_partials(self.psi, x, 2)[2], "hessian")

    def skewness(self) -> CovariantTensor:
        return CovariantTensor(self.chart, lambda x: taylor_partials(self.psi, x, 3)[3], 3, "third_derivative", True)

    def structure(self) -> StatisticalStructure:
        return StatisticalStructure(self.metric(), self.skewness(), "exponential_family")


def exponential_family_structure(psi, chart: Chart) -> StatisticalStructure:
    return ExponentialFamily(chart, psi).structure()


# ---------------------------------------------------------------------------
# the Gaussian manifold


GAUSSIAN_LOG_DENSITY = "-(xi - mu)^2 / (2 * sigma^2) - log(sigma) - 0.5 * log(2 * pi)"


@dataclass
class GaussianModel:
    chart: Chart
    structure: StatisticalStructure
    density: DensityModel
    natural: CoordinateMap
    moment: CoordinateMap

    @property
    def g(self) -> Metric:
        return self.structure.g

    @property
    def T(self) -> CovariantTensor:
        return self.structure.T


def gaussian_chart() -> Chart:
    return Chart(("mu", "sigma"), domain=("sigma",), box=((-2.0, 2.0), (0.5, 3.0)))


def gaussian_structure(nodes: int = 200, window: float = 12.0) -> GaussianModel:
    """Closed-form Fisher-Rao metric, skewness and the flattening charts of ``N(μ, σ²)``."""
    chart = gaussian_chart()
    g = Metric.from_components(chart, [["1/sigma^2", 0], [0, "2/sigma^2"]], label="g")
    t = "2/sigma^3"
    T = CovariantTensor.from_components(
        chart, [[[0, t], [t, 0]], [[t, 0], [0, "8/sigma^3"]]], label="T", symmetric=True
    )
    natural = Chart(("x1", "x2"), domain=("-x2",), box=((-4.0, 4.0), (-2.0, -0.05)))
    moment = Chart(("m1", "m2"), domain=("m2 - m1^2",), box=((-2.0, 2.0), (0.3, 8.0)))
    density = DensityModel(
        chart, log_density=GAUSSIAN_LOG_DENSITY, center="mu", scale="sigma", nodes=nodes, window=window
    )
    return GaussianModel(
        chart,
        StatisticalStructure(g, T, "gaussian"),
        density,
        CoordinateMap(chart, natural, ["mu/sigma^2", "-1/(2*sigma^2)"], ["-x1/(2*x2)", "sqrt(-1/(2*x2))"]),
        CoordinateMap(chart, moment, ["mu", "mu^2 + sigma^2"], ["m1", "sqrt(m2 - m1^2)"]),
    )


GAUSSIAN_NATURAL_PSI = "-x1^2/(4*x2) + 0.5*log(pi/(-x2))"


def quartic_family() -> ExponentialFamily:
    """``ψ(x) = x⁴/12 + x²/2`` on the real line: ``g = x² + 1``, ``T = 2x``."""
    return ExponentialFamily(Chart(("x",), box=((-1.5, 1.5),)), "x^4/12 + x^2/2")


BUILTIN = ("gaussian", "quartic")
