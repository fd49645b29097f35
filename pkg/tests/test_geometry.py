import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from statlift.geometry import (
    Chart,
    Connection,
    CoordinateMap,
    DegenerateError,
    Metric,
    VectorField,
    curvature,
    dual_connection,
    horizontal_lift,
    is_nondegenerate,
    levi_civita,
    lie_bracket,
    nabla_g,
    signature,
    torsion,
    transform_connection,
    transform_metric,
)
from statlift.lifting import lift_covariant_tensor
from statlift.models import gaussian_structure
from statlift.series import DomainError
from statlift.statistical import duality_defect

G = gaussian_structure()
PLANE = Chart(("u", "v"), box=((-1.0, 1.0), (-1.0, 1.0)))
LINE = Chart(("x",), box=((-1.5, 1.5),))


def gauss_lc(mu, s):
    out = np.zeros((2, 2, 2))
    out[0, 0, 1] = out[0, 1, 0] = out[1, 1, 1] = -1 / s
    out[1, 0, 0] = 1 / (2 * s)
    return out


pts = G.chart.sample(15, seed=3)


def test_levi_civita_gaussian_closed_form():
    got = levi_civita(G.g).at(pts)
    want = np.array([gauss_lc(*p) for p in pts])
    np.testing.assert_allclose(got, want, rtol=1e-13, atol=1e-14)


def test_levi_civita_examples():
    flat = Metric.from_components(PLANE, [[1, 0], [0, 1]])
    assert np.all(levi_civita(flat).at([0.3, -0.2]) == 0)
    quartic = Metric.from_components(LINE, [["x^2"]])
    assert levi_civita(quartic).at([1.0])[0, 0, 0] == pytest.approx(1.0, abs=1e-14)


def test_levi_civita_torsion_free_and_metric():
    lc = levi_civita(G.g)
    assert np.max(np.abs(torsion(lc, pts))) <= 1e-11
    assert np.max(np.abs(nabla_g(lc, G.g, pts))) <= 1e-11


def test_singular_metric_reports_point():
    g = Metric.from_components(LINE, [["x^2"]])
    with pytest.raises(DegenerateError) as err:
        levi_civita(g).at([[1.0], [0.0]])
    assert np.asarray(err.value.point).tolist() == [0.0]


def test_dual_connection_examples():
    lc = levi_civita(G.g)
    np.testing.assert_allclose(dual_connection(G.g, lc).at(pts), lc.at(pts), atol=1e-12)
    a1 = G.structure.alpha_connection(1.0)
    np.testing.assert_allclose(
        dual_connection(G.g, a1).at(pts), G.structure.alpha_connection(-1.0).at(pts), rtol=1e-12, atol=1e-12
    )
    c = 2.5
    flat = Metric.from_components(LINE, [[1]])
    nab = Connection.from_components(LINE, [[[c]]])
    assert dual_connection(flat, nab).at([0.7])[0, 0, 0] == -c


def _random_connection(chart, seed):
    rng = np.random.default_rng(seed)
    n = chart.dim
    comps = np.empty((n, n, n), dtype=object)
    for idx in np.ndindex(n, n, n):
        a, b, c = rng.integers(-3, 4, 3)
        comps[idx] = f"{a} + {b}*mu*sigma + {c}*exp(mu)/sigma"
    return Connection.from_components(chart, comps.tolist())


@given(st.integers(0, 10_000))
def test_duality_identity_and_involution(seed):
    nab = _random_connection(G.chart, seed)
    dual = dual_connection(G.g, nab)
    p = G.chart.sample(5, seed)
    dg = np.asarray(G.g.at(p))
    scale = max(1.0, float(np.max(np.abs(dg))) * 10)
    assert np.max(np.abs(duality_defect(G.g, nab, dual, p))) <= 1e-10 * scale
    back = dual_connection(G.g, dual).at(p)
    ref = nab.at(p)
    assert np.max(np.abs(back - ref)) <= 1e-10 * max(1.0, np.max(np.abs(ref)))


def test_duality_identity_on_random_vectors(rng):
    nab = _random_connection(G.chart, 11)
    dual = dual_connection(G.g, nab)
    for p in G.chart.sample(10, 5):
        X, Y, Z = rng.standard_normal((3, 2))
        h = 1e-6
        dg_x = (G.g.at(p + h * X) - G.g.at(p - h * X)) / (2 * h)
        lhs = Y @ dg_x @ Z
        gam, gst, gv = nab.at(p), dual.at(p), G.g.at(p)
        nXY = np.einsum("kij,i,j->k", gam, X, Y)
        nXZ = np.einsum("kij,i,j->k", gst, X, Z)
        rhs = nXY @ gv @ Z + Y @ gv @ nXZ
        assert lhs == pytest.approx(rhs, rel=1e-6, abs=1e-6)


def test_torsion_examples():
    nab = Connection.from_components(PLANE, [[[0, 1], [0, 0]], [[0, 0], [0, 0]]])
    tor = torsion(nab, [0.0, 0.0])
    assert tor[0, 0, 1] == 1 and tor[0, 1, 0] == -1
    for alpha in (-1, 0, 0.5, 2):
        assert np.max(np.abs(torsion(G.structure.alpha_connection(alpha), pts))) <= 1e-13


def test_curvature_flat_and_antisymmetric():
    assert np.all(curvature(Connection.flat(PLANE), [0.1, 0.2]) == 0)
    R = curvature(levi_civita(G.g), pts)
    assert np.array_equal(R, -np.swapaxes(R, -1, -2))
    assert np.max(np.abs(R)) > 0.1
    for alpha in (1.0, -1.0):
        assert np.max(np.abs(curvature(G.structure.alpha_connection(alpha), pts))) <= 1e-9


def test_curvature_of_hyperbolic_half_plane():
    half = Chart(("x", "y"), domain=("y",), box=((-1.0, 1.0), (0.2, 3.0)))
    g = Metric.from_components(half, [["1/y^2", 0], [0, "1/y^2"]])
    p = half.sample(6, 1)
    R = curvature(levi_civita(g), p)
    # constant curvature -1: R(dx, dy)dy = -g_yy dx
    np.testing.assert_allclose(R[:, 0, 1, 0, 1], -1 / p[:, 1] ** 2, rtol=1e-12)
    np.testing.assert_allclose(R[:, 1, 0, 0, 1], 1 / p[:, 1] ** 2, rtol=1e-12)


def test_nabla_g_examples():
    a1 = G.structure.alpha_connection(1.0)
    ng = nabla_g(a1, G.g, [0.0, 1.0])
    assert ng[1, 1, 1] == pytest.approx(8.0, rel=1e-13)
    assert ng[0, 0, 1] == pytest.approx(2.0, rel=1e-13)
    scaled = Metric.from_components(LINE, [[3]])
    assert np.all(nabla_g(Connection.flat(LINE), scaled, [0.4]) == 0)


def test_signature_examples():
    assert signature(G.g, [0.0, 1.0]) == (2, 0)
    gc = lift_covariant_tensor(G.g, 1, 1)
    assert signature(gc, [0.0, 1.0, 0.0, 0.0]) == (2, 2)
    assert signature(Metric.from_components(PLANE, [[1, 0], [0, -1]]), [0, 0]) == (1, 1)
    with pytest.raises(DegenerateError):
        signature(Metric.from_components(PLANE, [[1, 0], [0, "u"]]), [0.0, 0.0])
    with pytest.raises(ValueError):
        signature(G.g, pts)


def test_is_nondegenerate():
    det, ok = is_nondegenerate(G.g, pts)
    assert ok and det > 0
    _, ok = is_nondegenerate(Metric.from_components(PLANE, [[1, 0], [0, "u"]]), [[0.0, 0.3]])
    assert not ok


def test_domain_checked_on_evaluation():
    with pytest.raises(DomainError):
        G.g.at([0.0, -1.0])


def test_transform_identity_and_roundtrip():
    ident = CoordinateMap(G.chart, Chart(("a", "b"), domain=("b",)), ["mu", "sigma"], ["a", "b"])
    a = G.structure.alpha_connection(0.5)
    np.testing.assert_allclose(transform_connection(ident, a).at(pts), a.at(pts), atol=1e-14)
    np.testing.assert_allclose(transform_metric(ident, G.g).at(pts), G.g.at(pts), atol=1e-14)
    for cmap in (G.natural, G.moment):
        assert cmap.roundtrip_defect(pts) <= 1e-9
        y = cmap(pts)
        there = transform_connection(cmap, a)
        back = transform_connection(cmap.inverted(), there).at(pts)
        np.testing.assert_allclose(back, a.at(pts), rtol=1e-9, atol=1e-9)
        gy = transform_metric(cmap, G.g).at(y)
        gb = transform_metric(cmap.inverted(), transform_metric(cmap, G.g)).at(pts)
        np.testing.assert_allclose(gb, G.g.at(pts), rtol=1e-9, atol=1e-9)
        assert gy.shape == (len(pts), 2, 2)


def test_flattening_charts():
    assert G.natural([0.0, 1.0]).tolist() == [0.0, -0.5]
    y = G.natural(pts)
    assert np.max(np.abs(transform_connection(G.natural, G.structure.alpha_connection(1.0)).at(y))) <= 1e-9
    m = G.moment(pts)
    assert np.max(np.abs(transform_connection(G.moment, G.structure.alpha_connection(-1.0)).at(m))) <= 1e-9


def _horizontal(alpha, field):
    comps = ["1", "0"] if field == "mu" else ["0", "1"]
    return horizontal_lift(G.structure.alpha_connection(alpha), VectorField.from_components(G.chart, comps))


def test_horizontal_lift_gaussian():
    tpts = G.chart.tangent(1).sample(10, 4)
    mu, s, md, sd = tpts.T
    M = _horizontal(0.0, "mu").at(tpts)
    np.testing.assert_allclose(M, np.stack([np.ones_like(mu), 0 * mu, sd / s, -md / (2 * s)], -1), rtol=1e-13, atol=1e-15)
    for alpha in (-1.0, 0.5, 2.0):
        S = _horizontal(alpha, "sigma").at(tpts)
        want = np.stack([0 * mu, np.ones_like(mu), (1 + alpha) * md / s, (1 + 2 * alpha) * sd / s], -1)
        np.testing.assert_allclose(S, want, rtol=1e-13, atol=1e-15)
    flat = horizontal_lift(Connection.flat(PLANE), VectorField.from_components(PLANE, ["2", "-1"]))
    assert np.all(flat.at([0.1, 0.2, 0.3, 0.4])[2:] == 0)


def test_alpha_commutator():
    tpts = G.chart.tangent(1).sample(10, 9)
    mu, s, md, sd = tpts.T
    for alpha in (-1.0, 0.0, 0.5, 1.0, 2.0):
        br = lie_bracket(_horizontal(alpha, "mu"), _horizontal(alpha, "sigma")).at(tpts)
        c = (1 - alpha**2) / (2 * s**2)
        want = np.stack([0 * mu, 0 * mu, c * 2 * sd, -c * md], -1)
        assert np.max(np.abs(br - want)) <= 1e-9 * max(1.0, np.max(np.abs(want)))


def test_tangent_chart_labels_are_lambda_major():
    tc = G.chart.tangent(2)
    assert tc.names == ("(mu,0)", "(sigma,0)", "(mu,1)", "(sigma,1)", "(mu,2)", "(sigma,2)")
    assert tc.index(1, 2) == 5
    assert tc.blocks(np.arange(6.0)).tolist() == [[0, 1], [2, 3], [4, 5]]


def test_sampling_is_seeded_and_inside_domain():
    a = G.chart.sample(20, 42)
    assert np.array_equal(a, G.chart.sample(20, 42))
    assert not np.array_equal(a, G.chart.sample(20, 43))
    assert np.all(a[:, 1] > 0)
