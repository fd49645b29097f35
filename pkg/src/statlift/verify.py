"""Seeded, tolerance-tagged verification suites and their JSON scorecards.

Every check compares a computed quantity against a reference at seeded
points, reports the worst absolute defect, and passes when
``defect <= tolerance * scale`` with ``scale = max(1, max|reference|)``
(unless the table marks the tolerance as absolute).  All tolerances live in
:data:`TOLERANCES`.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass

import numpy as np

from .contrast import (
    induced_all,
    induced_connection,
    induced_dual_connection,
    induced_metric,
    induced_skewness,
    validate_contrast,
)
from .geometry import (
    Connection,
    VectorField,
    curvature,
    dual_connection,
    horizontal_lift,
    levi_civita,
    lie_bracket,
    lower_connection,
    nabla_g,
    signature,
    torsion,
    transform_connection,
)
from .jet import taylor_partials
from .lifting import (
    lift_connection,
    lift_contrast,
    lift_covariant_tensor,
    lift_function,
    lift_tensor,
    tangent_manifold,
)
from .modelfile import Target, builtin_target
from .models import gaussian_structure
from .statistical import (
    StatisticalStructure,
    alpha_connection,
    duality_defect,
    symmetry_defect,
    torsion_coupling_defect,
)

SCORECARD_VERSION = 1

SUITES = (
    "alpha_family",
    "contrast_lift",
    "expfam_paper_values",
    "gaussian_paper_values",
    "smat_lift",
    "statmlift",
)

# (tolerance, relative?)  Relative tolerances are multiplied by max(1, max|reference|).
TOLERANCES = {
    "statmlift.nondegenerate": (1e10, False),  # condition number of g^c
    "statmlift.torsion_curvature_lift": (1e-9, True),
    "statmlift.dual_lift": (1e-9, True),
    "statmlift.levi_civita_lift": (1e-9, True),
    "statmlift.midpoint": (1e-9, True),
    "statmlift.dualistic": (1e-9, True),
    "statmlift.codazzi": (1e-9, True),
    "smat_lift.torsion_coupled": (1e-9, True),
    "smat_lift.dual_torsion_free": (1e-9, True),
    "smat_lift.witness": (0.0, False),
    "contrast_lift.validity": (1e-10, False),
    "contrast_lift.nondegenerate": (1e10, False),  # reciprocal of the normalized |det g^F|
    "contrast_lift.analytic": (1e-8, True),
    "contrast_lift.quadrature": (1e-6, True),
    "alpha_family.dual_pair": (1e-10, True),
    "alpha_family.midpoint": (1e-12, True),
    "alpha_family.skewness_recovery": (1e-10, True),
    "alpha_family.lift_commutes": (1e-9, True),
    "gaussian_paper_values.golden": (1e-10, True),
    "gaussian_paper_values.signature": (0.0, False),
    "gaussian_paper_values.flatness": (1e-9, False),
    "expfam_paper_values.golden": (1e-10, True),
}

# Lower bound on the torsion and Codazzi asymmetry of the SMAT example, so
# the torsion-coupling checks are not passed vacuously.
SMAT_WITNESS_FLOOR = 1e-3

DEFAULT_COUNTS = {
    "alpha_family": 20,
    "contrast_lift": 20,
    "expfam_paper_values": 10,
    "gaussian_paper_values": 10,
    "smat_lift": 20,
    "statmlift": 20,
}

DEFAULT_TARGETS = {
    "alpha_family": "gaussian",
    "contrast_lift": "exp_quadratic",
    "expfam_paper_values": "quartic",
    "gaussian_paper_values": "gaussian",
    "smat_lift": "plane",
    "statmlift": "gaussian",
}

GOLDEN_ALPHAS = (-1.0, 0.0, 0.5, 1.0, 2.0)
FAMILY_ALPHAS = (-1.0, -0.5, 0.0, 0.5, 1.0, 2.0)


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    anchor: str
    points: int
    max_defect: float
    tolerance: float
    scale: float
    passed: bool
    seed: int

    def as_dict(self) -> dict:
        return asdict(self)


class _Recorder:
    def __init__(self, seed: int):
        self.seed = seed
        self.results: list[CheckResult] = []

    def add(self, check_id, anchor, key, defect, reference=None, points=0):
        tol, relative = TOLERANCES[key]
        d = np.abs(np.asarray(defect, dtype=float))
        worst = float(np.max(d)) if d.size else 0.0
        scale = 1.0
        if relative and reference is not None and np.size(reference):
            scale = max(1.0, float(np.max(np.abs(reference))))
        passed = bool(worst <= tol * scale)
        self.results.append(CheckResult(check_id, anchor, int(points), worst, tol, scale, passed, self.seed))

    def compare(self, check_id, anchor, key, got, want, points):
        got, want = np.asarray(got, dtype=float), np.asarray(want, dtype=float)
        self.add(check_id, anchor, key, got - want, want, points)


def _alpha_tag(alpha: float) -> str:
    return f"alpha={alpha:+g}"


# ---------------------------------------------------------------------------
# statmlift


def _statmlift(rec: _Recorder, s: StatisticalStructure, r: int, count: int):
    tc = s.chart.tangent(r)
    X = tc.sample(count, rec.seed)
    nabla, star, lc = s.alpha_connection(1.0), s.alpha_connection(-1.0), s.levi_civita()
    gc = lift_covariant_tensor(s.g, r, r)
    nc = lift_connection(nabla, r)
    star_c = lift_connection(star, r)
    pre = f"statmlift/r={r}/"

    gv = gc.at(X)
    rec.add(pre + "1_nondegenerate", "lifted metric is nondegenerate", "statmlift.nondegenerate",
            np.linalg.cond(gv), points=count)

    tor_c, tor_lift = torsion(nc).at(X), lift_tensor(torsion(nabla), r, r).at(X)
    cur_c, cur_lift = curvature(nc).at(X), lift_tensor(curvature(nabla), r, r).at(X)
    defect = np.concatenate([(tor_c - tor_lift).reshape(count, -1), (cur_c - cur_lift).reshape(count, -1)], axis=1)
    ref = np.concatenate([tor_lift.reshape(count, -1), cur_lift.reshape(count, -1)], axis=1)
    rec.add(pre + "2_torsion_curvature_lift", "torsion and curvature commute with the complete lift",
            "statmlift.torsion_curvature_lift", defect, ref, count)

    dual_c = dual_connection(gc, nc).at(X)
    sv = star_c.at(X)
    rec.compare(pre + "3_dual_lift", "lift of the dual connection is the dual of the lift",
                "statmlift.dual_lift", dual_c, sv, count)

    lc_gc = levi_civita(gc).at(X)
    rec.compare(pre + "4_levi_civita_lift", "Levi-Civita connection commutes with the complete lift",
                "statmlift.levi_civita_lift", lc_gc, lift_connection(lc, r).at(X), count)

    mid = 0.5 * (nc.at(X) + dual_c)
    defect = np.concatenate([(lc_gc - mid).reshape(count, -1), tor_c.reshape(count, -1)], axis=1)
    rec.add(pre + "5_midpoint", "lifted metric connection is the midpoint of the lifted dual pair",
            "statmlift.midpoint", defect, lc_gc, count)

    dd = duality_defect(gc, nc, star_c, X)
    defect = np.concatenate(
        [dd.reshape(count, -1), tor_c.reshape(count, -1), torsion(star_c).at(X).reshape(count, -1)], axis=1
    )
    rec.add(pre + "6_dualistic", "lifted dual pair is a torsion-free dualistic structure",
            "statmlift.dualistic", defect, gv, count)

    ng = nabla_g(nc, gc).at(X)
    defect = np.concatenate([symmetry_defect(ng, 3).reshape(count, -1), tor_c.reshape(count, -1)], axis=1)
    rec.add(pre + "7_codazzi", "lifted connection is torsion-free and Codazzi coupled with the lifted metric",
            "statmlift.codazzi", defect, ng, count)


# ---------------------------------------------------------------------------
# SMAT


def smat_example(s: StatisticalStructure) -> Connection:
    """Dual of the ``α = 1`` connection perturbed by ``Γ^0_{n-1,n-1} += 1 + (x^0)^2``.

    The perturbation keeps the connection torsion-free but breaks Codazzi
    coupling, so its dual has torsion and is torsion coupled with ``g``.
    """
    chart = s.chart
    n = chart.dim
    if n < 2:
        raise ValueError("the torsion-coupled example needs a chart of dimension at least 2")
    comps = np.zeros((n, n, n), dtype=object)
    comps[0, n - 1, n - 1] = f"1 + {chart.names[0]}^2"
    pert = Connection.from_components(chart, comps.tolist())
    base = s.alpha_connection(1.0)
    D = Connection(chart, lambda x: base(x) + pert(x), "perturbed")
    nabla = dual_connection(s.g, D)
    nabla.label = "smat"
    return nabla


def _smat_checks(rec, pre, g, nabla, points):
    count = len(points)
    ng = nabla_g(nabla, g).at(points)
    rec.add(pre + "torsion_coupled", "connection is torsion coupled with the metric",
            "smat_lift.torsion_coupled", torsion_coupling_defect(g, nabla, points), ng, count)
    rec.compare(pre + "dual_torsion_free", "dual connection is torsion-free",
                "smat_lift.dual_torsion_free", torsion(dual_connection(g, nabla)).at(points), 0.0, count)
    return ng


def _smat(rec: _Recorder, s: StatisticalStructure, r_values, count: int):
    nabla = smat_example(s)
    p = s.chart.sample(count, rec.seed)
    ng = _smat_checks(rec, "smat_lift/base/", s.g, nabla, p)
    witness = min(float(np.max(np.abs(torsion(nabla).at(p)))), float(np.max(symmetry_defect(ng, 3))))
    rec.add("smat_lift/base/witness", "example has torsion and is not Codazzi coupled", "smat_lift.witness",
            max(0.0, SMAT_WITNESS_FLOOR - witness), points=count)
    for r in r_values:
        tc = s.chart.tangent(r)
        X = tc.sample(count, rec.seed)
        _smat_checks(rec, f"smat_lift/r={r}/", lift_covariant_tensor(s.g, r, r), lift_connection(nabla, r), X)


# ---------------------------------------------------------------------------
# contrast lift


def _validity(rec, pre, F, points, key):
    """Jet vanishing on the diagonal, and ``1 / |det g^F|`` (normalized) as a nondegeneracy defect."""
    rep = validate_contrast(F, points)
    rec.add(pre + "is_contrast", "function and its first jet vanish on the diagonal", key,
            [rep.max_value, rep.max_gradient], None, len(points))
    inv_det = np.inf if rep.min_det == 0 else 1.0 / rep.min_det
    rec.add(pre + "nondegenerate", "induced metric is nondegenerate", "contrast_lift.nondegenerate",
            inv_det, None, len(points))
    return rec.results[-1].passed and rec.results[-2].passed


def _contrast_lift(rec: _Recorder, target: Target, r_values, count: int):
    F = target.contrast
    if F is None:
        raise ValueError(f"model {target.name!r} has no contrast function")
    key = "contrast_lift.quadrature" if target.quadrature else "contrast_lift.analytic"
    p = F.chart.sample(count, rec.seed)
    if not _validity(rec, "contrast_lift/base/", F, p, "contrast_lift.validity"):
        return
    for r in r_values:
        pre = f"contrast_lift/r={r}/"
        tc = F.chart.tangent(r)
        X = tc.sample(count, rec.seed)
        Fc = lift_contrast(F, r)
        _validity(rec, pre, Fc, X, key)
        got = induced_all(Fc, X)
        want = {
            "metric": lift_covariant_tensor(induced_metric(F), r, r).at(X),
            "connection": lift_connection(induced_connection(F), r).at(X),
            "dual_connection": lift_connection(induced_dual_connection(F), r).at(X),
            "skewness": lift_covariant_tensor(induced_skewness(F), r, r).at(X),
        }
        for name, w in want.items():
            rec.compare(pre + name, f"induced {name.replace('_', ' ')} of the lifted contrast is the lift",
                        key, got[name], w, count)


# ---------------------------------------------------------------------------
# alpha family


def _lowered(g, gam):
    return np.einsum("...kl,...lij->...ijk", g, gam)


def _alpha_family(rec: _Recorder, s: StatisticalStructure, r_values, count: int):
    p = s.chart.sample(count, rec.seed)
    gv = s.g.at(p)
    lc_low = _lowered(gv, s.levi_civita().at(p))
    for a in FAMILY_ALPHAS:
        tag = _alpha_tag(a)
        ga, gm = alpha_connection(s, a), alpha_connection(s, -a)
        rec.add(f"alpha_family/base/{tag}/dual_pair", "alpha and minus alpha connections are dual",
                "alpha_family.dual_pair", duality_defect(s.g, ga, gm, p), gv, count)
        mid = 0.5 * (_lowered(gv, ga.at(p)) + _lowered(gv, gm.at(p)))
        rec.compare(f"alpha_family/base/{tag}/midpoint", "alpha pair averages to the metric connection",
                    "alpha_family.midpoint", mid, lc_low, count)
    T = s.T.at(p)
    rec.compare("alpha_family/base/skewness_recovery", "nabla g of the alpha=1 connection is the skewness",
                "alpha_family.skewness_recovery", nabla_g(alpha_connection(s, 1.0), s.g).at(p), T, count)
    for r in r_values:
        lifted = tangent_manifold(s, r)
        X = lifted.chart.sample(count, rec.seed)
        for a in FAMILY_ALPHAS:
            rec.compare(f"alpha_family/r={r}/{_alpha_tag(a)}/lift_commutes",
                        "lift of the alpha connection is the alpha connection of the lift",
                        "alpha_family.lift_commutes",
                        lift_connection(alpha_connection(s, a), r).at(X),
                        alpha_connection(lifted, a).at(X), count)


# ---------------------------------------------------------------------------
# Gaussian closed forms


def gaussian_alpha_table(alpha, sigma):
    """``Γ^k_ij`` of the Gaussian α-connection, indexed ``[..., k, i, j]`` over ``(μ, σ)``."""
    s = np.asarray(sigma, dtype=float)
    out = np.zeros(s.shape + (2, 2, 2))
    out[..., 0, 0, 1] = out[..., 0, 1, 0] = -(alpha + 1) / s
    out[..., 1, 1, 1] = -(2 * alpha + 1) / s
    out[..., 1, 0, 0] = (1 - alpha) / (2 * s)
    return out


def gaussian_lifted_alpha_table(alpha, sigma, sigma_dot):
    """Christoffel symbols of the lifted α-connection on ``T M``, coordinates ``(μ, σ, μ̇, σ̇)``.

    Undotted symbols equal the base ones; one dotted upper and one dotted
    lower index gives the undotted symbol; a dotted upper index alone gives
    the tangent lift; everything else vanishes.
    """
    base = gaussian_alpha_table(alpha, sigma)
    s = np.asarray(sigma, dtype=float)[..., None, None, None]
    tangent = -base * np.asarray(sigma_dot, dtype=float)[..., None, None, None] / s
    out = np.zeros(base.shape[:-3] + (4, 4, 4))
    for k, i, j in itertools.product(range(4), repeat=3):
        up, lows = k >= 2, (i >= 2) + (j >= 2)
        src = (k % 2, i % 2, j % 2)
        if not up and lows == 0:
            out[..., k, i, j] = base[(Ellipsis,) + src]
        elif up and lows == 1:
            out[..., k, i, j] = base[(Ellipsis,) + src]
        elif up and lows == 0:
            out[..., k, i, j] = tangent[(Ellipsis,) + src]
    return out


def gaussian_lifted_levi_civita(sigma, sigma_dot):
    """The lifted Levi-Civita table listed symbol by symbol (unlisted symbols vanish)."""
    s = np.asarray(sigma, dtype=float)
    sd = np.asarray(sigma_dot, dtype=float)
    out = np.zeros(s.shape + (4, 4, 4))
    mu, sg, mud, sgd = range(4)
    for k, i, j in [(mu, mu, sg), (mu, sg, mu), (sg, sg, sg), (mud, mud, sg), (mud, sg, mud),
                    (mud, mu, sgd), (mud, sgd, mu), (sgd, sg, sgd), (sgd, sgd, sg)]:
        out[..., k, i, j] = -1 / s
    out[..., sg, mu, mu] = 1 / (2 * s)
    out[..., sgd, mu, mud] = out[..., sgd, mud, mu] = 1 / (2 * s)
    out[..., mud, mu, sg] = out[..., mud, sg, mu] = sd / s**2
    out[..., sgd, sg, sg] = sd / s**2
    out[..., sgd, mu, mu] = -sd / (2 * s**2)
    return out


def gaussian_lifted_metric(sigma, sigma_dot):
    s = np.asarray(sigma, dtype=float)
    sd = np.asarray(sigma_dot, dtype=float)
    out = np.zeros(s.shape + (4, 4))
    out[..., 0, 0] = -2 * sd
    out[..., 1, 1] = -4 * sd
    out[..., 0, 2] = out[..., 2, 0] = s
    out[..., 1, 3] = out[..., 3, 1] = 2 * s
    return out / s[..., None, None] ** 3


def _symmetric_fill(out, idx, value):
    for perm in set(itertools.permutations(idx)):
        out[(Ellipsis,) + perm] = value


def gaussian_skewness(sigma):
    s = np.asarray(sigma, dtype=float)
    out = np.zeros(s.shape + (2, 2, 2))
    _symmetric_fill(out, (0, 0, 1), 2 / s**3)
    _symmetric_fill(out, (1, 1, 1), 8 / s**3)
    return out


def gaussian_lifted_skewness(sigma, sigma_dot):
    s = np.asarray(sigma, dtype=float)
    sd = np.asarray(sigma_dot, dtype=float)
    out = np.zeros(s.shape + (4, 4, 4))
    _symmetric_fill(out, (0, 0, 1), -6 * sd / s**4)
    _symmetric_fill(out, (1, 1, 1), -24 * sd / s**4)
    _symmetric_fill(out, (2, 0, 1), 2 / s**3)
    _symmetric_fill(out, (0, 0, 3), 2 / s**3)
    _symmetric_fill(out, (3, 1, 1), 8 / s**3)
    return out


def gaussian_horizontal_fields(alpha, point):
    """``(M^α, S^α)`` components at points ``(μ, σ, μ̇, σ̇)``."""
    p = np.asarray(point, dtype=float)
    s, md, sd = p[..., 1], p[..., 2], p[..., 3]
    one, zero = np.ones_like(s), np.zeros_like(s)
    M = np.stack([one, zero, (1 + alpha) * sd / s, -(1 - alpha) * md / (2 * s)], axis=-1)
    S = np.stack([zero, one, (1 + alpha) * md / s, (1 + 2 * alpha) * sd / s], axis=-1)
    return M, S


def gaussian_commutator(alpha, point):
    p = np.asarray(point, dtype=float)
    s, md, sd = p[..., 1], p[..., 2], p[..., 3]
    c = (1 - alpha**2) / (2 * s**2)
    zero = np.zeros_like(s)
    return np.stack([zero, zero, 2 * c * sd, -c * md], axis=-1)


def _coordinate_field(chart, i):
    comps = [0] * chart.dim
    comps[i] = 1
    return VectorField.from_components(chart, comps)


def _gaussian_values(rec: _Recorder, s: StatisticalStructure, count: int):
    chart = s.chart
    key = "gaussian_paper_values.golden"
    X = chart.tangent(1).sample(count, rec.seed)
    p = X[:, :2]
    sigma, sigma_dot = p[:, 1], X[:, 3]
    pre = "gaussian_paper_values/"
    g_want = np.zeros((count, 2, 2))
    g_want[:, 0, 0], g_want[:, 1, 1] = 1 / sigma**2, 2 / sigma**2
    rec.compare(pre + "metric", "Gaussian Fisher-Rao metric", key, s.g.at(p), g_want, count)
    rec.compare(pre + "skewness", "Gaussian skewness tensor", key, s.T.at(p), gaussian_skewness(sigma), count)
    rec.compare(pre + "levi_civita", "Gaussian Levi-Civita symbols", key,
                s.levi_civita().at(p), gaussian_alpha_table(0.0, sigma), count)
    rec.compare(pre + "lifted_metric", "complete lift of the Gaussian metric", key,
                lift_covariant_tensor(s.g, 1, 1).at(X), gaussian_lifted_metric(sigma, sigma_dot), count)
    rec.compare(pre + "lifted_skewness", "complete lift of the Gaussian skewness tensor", key,
                lift_covariant_tensor(s.T, 1, 1).at(X), gaussian_lifted_skewness(sigma, sigma_dot), count)
    rec.compare(pre + "lifted_levi_civita", "lifted Gaussian Levi-Civita symbols", key,
                lift_connection(s.levi_civita(), 1).at(X), gaussian_lifted_levi_civita(sigma, sigma_dot), count)
    dmu, dsigma = _coordinate_field(chart, 0), _coordinate_field(chart, 1)
    for a in GOLDEN_ALPHAS:
        tag = _alpha_tag(a)
        na = alpha_connection(s, a)
        rec.compare(f"{pre}alpha/{tag}/christoffel", "Gaussian alpha-connection symbols", key,
                    na.at(p), gaussian_alpha_table(a, sigma), count)
        Mh, Sh = horizontal_lift(na, dmu), horizontal_lift(na, dsigma)
        M, S = gaussian_horizontal_fields(a, X)
        got = np.concatenate([Mh.at(X), Sh.at(X)], axis=-1)
        rec.compare(f"{pre}alpha/{tag}/horizontal_fields", "horizontal lifts of the coordinate fields", key,
                    got, np.concatenate([M, S], axis=-1), count)
        rec.compare(f"{pre}alpha/{tag}/commutator", "bracket of the alpha horizontal fields", key,
                    lie_bracket(Mh, Sh).at(X), gaussian_commutator(a, X), count)
        rec.compare(f"{pre}alpha/{tag}/lifted_christoffel", "lifted Gaussian alpha-connection symbols", key,
                    lift_connection(na, 1).at(X), gaussian_lifted_alpha_table(a, sigma, sigma_dot), count)

    skey = "gaussian_paper_values.signature"
    n_sig = max(count, 20)
    base_pts = chart.sample(n_sig, rec.seed)
    lift_pts = chart.tangent(1).sample(n_sig, rec.seed)
    gc = lift_covariant_tensor(s.g, 1, 1)
    rec.add(pre + "signature/base", "Gaussian metric is Riemannian", skey,
            sum(signature(s.g, q) != (2, 0) for q in base_pts), points=n_sig)
    rec.add(pre + "signature/lifted", "lifted Gaussian metric has signature (2,2)", skey,
            sum(signature(gc, q) != (2, 2) for q in lift_pts), points=n_sig)

    fkey = "gaussian_paper_values.flatness"
    for a in (1.0, -1.0):
        rec.add(f"{pre}flatness/{_alpha_tag(a)}/curvature", "alpha=+-1 connections are flat", fkey,
                curvature(alpha_connection(s, a)).at(base_pts), points=n_sig)
    m = gaussian_structure()
    for a, cmap, name in ((1.0, m.natural, "natural"), (-1.0, m.moment, "moment")):
        y = cmap(base_pts)
        rec.add(f"{pre}flatness/{_alpha_tag(a)}/{name}_chart", f"alpha connection vanishes in {name} coordinates",
                fkey, transform_connection(cmap, alpha_connection(s, a)).at(y), points=n_sig)


# ---------------------------------------------------------------------------
# exponential family


def _expfam_values(rec: _Recorder, target: Target, r_values, count: int):
    psi, s = target.psi, target.structure
    if psi is None:
        raise ValueError(f"model {target.name!r} has no potential")
    key = "expfam_paper_values.golden"
    p = s.chart.sample(count, rec.seed)
    _, _, h, d3 = taylor_partials(psi, p, 3)
    h, d3 = np.asarray(h.value), np.asarray(d3.value)
    rec.compare("expfam_paper_values/base/metric", "metric is the Hessian of the potential", key, s.g.at(p), h, count)
    rec.compare("expfam_paper_values/base/skewness", "skewness is the third derivative of the potential", key,
                s.T.at(p), d3, count)
    rec.compare("expfam_paper_values/base/levi_civita", "lowered Levi-Civita symbols are half the third derivative",
                key, lower_connection(s.g, s.levi_civita()).at(p), 0.5 * d3, count)
    for r in r_values:
        pre = f"expfam_paper_values/r={r}/"
        X = s.chart.tangent(r).sample(count, rec.seed)
        psic = lift_function(psi, r, r)
        _, _, h, d3 = taylor_partials(psic, X, 3)
        h, d3 = np.asarray(h.value), np.asarray(d3.value)
        gc = lift_covariant_tensor(s.g, r, r)
        rec.compare(pre + "metric", "lifted metric is the Hessian of the lifted potential", key, gc.at(X), h, count)
        rec.compare(pre + "skewness", "lifted skewness is the third derivative of the lifted potential", key,
                    lift_covariant_tensor(s.T, r, r).at(X), d3, count)
        rec.compare(pre + "connection", "lifted Levi-Civita symbols are half the third derivative of the lifted potential",
                    key, lower_connection(gc, lift_connection(s.levi_civita(), r)).at(X), 0.5 * d3, count)


# ---------------------------------------------------------------------------
# driver


def run_suite(
    suite: str,
    target=None,
    r_values=(1,),
    seed: int = 0,
    count: int | None = None,
    nodes: int = 200,
    window: float = 12.0,
) -> list[CheckResult]:
    """Run one suite against ``target`` (a :class:`Target`, a built-in name, or None for the default).

    Results are sorted by check id.
    """
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; expected one of {', '.join(SUITES)}")
    if target is None:
        target = DEFAULT_TARGETS[suite]
    if isinstance(target, str):
        target = builtin_target(target, nodes, window)
    r_values = tuple(int(r) for r in r_values)
    if any(r < 1 for r in r_values):
        raise ValueError("lift orders must be at least 1")
    count = DEFAULT_COUNTS[suite] if count is None else int(count)
    if count < 1:
        raise ValueError("count must be positive")
    rec = _Recorder(int(seed))
    s = target.structure
    if suite == "statmlift":
        for r in r_values:
            _statmlift(rec, s, r, count)
    elif suite == "smat_lift":
        _smat(rec, s, r_values, count)
    elif suite == "contrast_lift":
        _contrast_lift(rec, target, r_values, count)
    elif suite == "alpha_family":
        _alpha_family(rec, s, r_values, count)
    elif suite == "gaussian_paper_values":
        if not target.gaussian:
            raise ValueError("gaussian_paper_values needs the built-in gaussian model")
        _gaussian_values(rec, s, count)
    else:
        _expfam_values(rec, target, r_values, count)
    return sorted(rec.results, key=lambda c: c.check_id)


def scorecard(suite, target_name, results, seed, r_values, count, nodes, window) -> dict:
    failed = [c.check_id for c in results if not c.passed]
    return {
        "schema_version": SCORECARD_VERSION,
        "suite": suite,
        "target": target_name,
        "seed": int(seed),
        "r_values": [int(r) for r in r_values],
        "count": count,
        "nodes": int(nodes),
        "window": float(window),
        "checks": [c.as_dict() for c in results],
        "summary": {"total": len(results), "passed": len(results) - len(failed), "failed": failed},
    }


def scorecard_json(card: dict) -> str:
    return json.dumps(card, sort_keys=True, indent=2) + "\n"
