"""Statistical structures ``(g, T)`` and the connections and couplings they define."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    Connection,
    CovariantTensor,
    Metric,
    dual_connection,
    einsum,
    inverse,
    levi_civita,
    nabla_g,
    rearrange,
    torsion,
    _dmetric,
)
from .jet import value_and_jacobian


@dataclass
class StatisticalStructure:
    """A metric together with a totally symmetric cubic tensor."""

    g: Metric
    T: CovariantTensor
    label: str = ""

    def __post_init__(self):
        if self.g.chart is not self.T.chart:
            raise ValueError("g and T must live on the same chart")
        if self.T.valence != 3:
            raise ValueError("the skewness tensor must be a (0,3) tensor")

    @property
    def chart(self):
        return self.g.chart

    def levi_civita(self) -> Connection:
        return levi_civita(self.g)

    def alpha_connection(self, alpha: float) -> Connection:
        return alpha_connection(self, alpha)


def alpha_connection(s: StatisticalStructure, alpha: float) -> Connection:
    """Lowered coefficients ``Γ^α_ijk = Γ^g_ijk − (α/2) T_ijk``, raised on ``k``."""
    alpha = float(alpha)
    g, T = s.g, s.T

    def fn(x):
        gv, d = _dmetric(g, x)
        low = (d + rearrange(d, "jil->ijl") - rearrange(d, "lij->ijl")) * 0.5
        if alpha != 0.0:
            low = low - T(x) * (0.5 * alpha)
        return einsum("...kl,...ijl->...kij", inverse(gv, x), low)

    return Connection(s.chart, fn, f"alpha={alpha!r}")


class CouplingError(ValueError):
    def __init__(self, message, defect):
        super().__init__(message)
        self.defect = defect


@dataclass
class Report:
    """Outcome of a sampled check: worst defect, where, and the verdict."""

    name: str
    max_defect: float
    tolerance: float
    scale: float
    argmax: list | None
    points: int
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.max_defect <= self.tolerance * self.scale)

    def __bool__(self):
        return self.passed

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "max_defect": self.max_defect,
            "tolerance": self.tolerance,
            "scale": self.scale,
            "argmax": self.argmax,
            "points": self.points,
            "passed": self.passed,
            "details": self.details,
        }


def _report(name, defect, reference, points, tol, **details):
    """``defect`` has the points as leading axis; ``scale = max(1, max|reference|)``."""
    points = np.asarray(points, dtype=float)
    per = np.max(np.abs(defect).reshape(len(points), -1), axis=1) if defect.size else np.zeros(len(points))
    k = int(np.argmax(per))
    scale = max(1.0, float(np.max(np.abs(reference)))) if np.size(reference) else 1.0
    return Report(name, float(per[k]), tol, scale, points[k].tolist(), len(points), details)


def _points(chart, points):
    p = chart.check(points)
    return p.reshape(-1, chart.dim)


def symmetry_defect(a: np.ndarray, axes: int) -> np.ndarray:
    """Largest deviation from total symmetry over the last ``axes`` axes."""
    nb = a.ndim - axes
    worst = np.zeros(a.shape)
    for perm in itertools.permutations(range(axes)):
        worst = np.maximum(worst, np.abs(a - a.transpose(tuple(range(nb)) + tuple(nb + p for p in perm))))
    return worst


def skewness_from_pair(g: Metric, nabla: Connection, points=None, tol: float = 1e-10) -> CovariantTensor:
    """``T = ∇g``; with ``points``, raise :class:`CouplingError` if not totally symmetric."""
    ng = nabla_g(nabla, g)
    T = CovariantTensor(g.chart, ng.fn, 3, "skewness", symmetric=True)
    if points is not None:
        rep = is_codazzi(g, nabla, points, tol)
        if not rep.passed:
            raise CouplingError(
                f"connection is not Codazzi coupled with g: asymmetry {rep.max_defect:.3e}", rep.max_defect
            )
    return T


def is_codazzi(g: Metric, nabla: Connection, points, tol: float = 1e-10) -> Report:
    """Total symmetry of ``∇g`` at the sampled points."""
    p = _points(g.chart, points)
    ng = nabla_g(nabla, g).at(p)
    return _report("codazzi", symmetry_defect(ng, 3), ng, p, tol)


def duality_defect(g: Metric, nabla: Connection, nabla_star: Connection, points) -> np.ndarray:
    """``∂_k g_ij − Γ^m_ki g_mj − Γ*^m_kj g_im`` indexed ``[point, k, i, j]``."""
    p = _points(g.chart, points)
    gv, dg = value_and_jacobian(g, p)
    gam, gst = nabla.at(p), nabla_star.at(p)
    gv, dg = np.asarray(gv.value), np.asarray(dg.value)
    d = np.moveaxis(dg, -1, -3)
    return (
        d
        - np.einsum("...mki,...mj->...kij", gam, gv)
        - np.einsum("...mkj,...im->...kij", gst, gv)
    )


def is_dual_pair(g: Metric, nabla: Connection, nabla_star: Connection, points, tol: float = 1e-10) -> Report:
    p = _points(g.chart, points)
    defect = duality_defect(g, nabla, nabla_star, p)
    _, dg = value_and_jacobian(g, p)
    tor = float(np.max(np.abs(torsion(nabla).at(p))))
    tor_star = float(np.max(np.abs(torsion(nabla_star).at(p))))
    return _report(
        "dual_pair", defect, np.asarray(dg.value), p, tol, torsion=tor, torsion_dual=tor_star
    )


def torsion_coupling_defect(g: Metric, nabla: Connection, points) -> np.ndarray:
    """``(∇_i g)_jl − (∇_j g)_il + g(Tor(∂i, ∂j), ∂l)`` indexed ``[point, i, j, l]``."""
    p = _points(g.chart, points)
    ng = nabla_g(nabla, g).at(p)
    tor = torsion(nabla).at(p)
    gv = g.at(p)
    return ng - np.swapaxes(ng, -3, -2) + np.einsum("...kij,...kl->...ijl", tor, gv)


def is_torsion_coupled(g: Metric, nabla: Connection, points, tol: float = 1e-10) -> Report:
    """SMAT coupling; also reports the torsion of the dual connection."""
    p = _points(g.chart, points)
    defect = torsion_coupling_defect(g, nabla, p)
    ng = nabla_g(nabla, g).at(p)
    dual_tor = float(np.max(np.abs(torsion(dual_connection(g, nabla)).at(p))))
    return _report("torsion_coupled", defect, ng, p, tol, dual_torsion=dual_tor)
