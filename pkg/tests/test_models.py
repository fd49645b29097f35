import numpy as np
import pytest
from scipy import integrate

from statlift.geometry import Chart, levi_civita, lower_connection, transform_metric, transform_tensor
from statlift.jet import Jet
from statlift.models import (
    DensityModel,
    ExponentialFamily,
    NormalizationError,
    exponential_family_structure,
    gaussian_structure,
    quartic_family,
    tree_sum,
)
from statlift.contrast import induced_metric

G = gaussian_structure()
PTS = G.chart.sample(10, seed=42)


def closed_kl(a, b):
    (m1, s1), (m2, s2) = a, b
    return np.log(s2 / s1) + (s1**2 + (m1 - m2) ** 2) / (2 * s2**2) - 0.5


def test_gaussian_closed_forms():
    assert G.g.at([0.0, 1.0]).tolist() == [[1.0, 0.0], [0.0, 2.0]]
    assert G.T.at([0.0, 1.0])[1, 1, 1] == 8.0
    assert G.natural([0.0, 1.0]).tolist() == [0.0, -0.5]
    assert G.moment([1.0, 2.0]).tolist() == [1.0, 5.0]


def test_fisher_rao_quadrature_matches_closed_form():
    fr = G.density.fisher_rao(PTS)
    assert np.max(np.abs(fr - G.g.at(PTS))) <= 1e-7 * max(1.0, np.max(np.abs(G.g.at(PTS))))
    np.testing.assert_allclose(G.density.fisher_rao([0.0, 2.0]), [[0.25, 0], [0, 0.5]], atol=1e-12)
    ac = G.density.amari_chentsov(PTS)
    np.testing.assert_allclose(ac, G.T.at(PTS), rtol=1e-8, atol=1e-8)
    assert G.density.amari_chentsov([0.0, 1.0])[1, 1, 1] == pytest.approx(8.0, rel=1e-10)


def test_fisher_rao_against_adaptive_quadrature():
    mu, s = 0.4, 1.3

    def score(xi):
        return np.array([(xi - mu) / s**2, (xi - mu) ** 2 / s**3 - 1 / s])

    def pdf(xi):
        return np.exp(-((xi - mu) ** 2) / (2 * s**2)) / (s * np.sqrt(2 * np.pi))

    want = np.array(
        [[integrate.quad(lambda t: score(t)[i] * score(t)[j] * pdf(t), -np.inf, np.inf, epsabs=1e-13)[0] for j in range(2)] for i in range(2)]
    )
    np.testing.assert_allclose(G.density.fisher_rao([mu, s]), want, atol=1e-10)


def test_quadrature_converges_when_nodes_double():
    a = G.density.with_quadrature(nodes=200).fisher_rao(PTS)
    b = G.density.with_quadrature(nodes=400).fisher_rao(PTS)
    assert np.max(np.abs(a - b)) < 1e-7


def test_kl_values():
    F = G.density.kl_contrast()
    assert F.evaluate([0.0, 1.0], [1.0, 1.0]) == pytest.approx(0.5, abs=1e-12)
    assert F.evaluate([0.3, 1.2], [0.3, 1.2]) == 0.0
    rng = np.random.default_rng(2)
    for _ in range(5):
        a = [rng.uniform(-1, 1), rng.uniform(0.5, 2.0)]
        b = [rng.uniform(-1, 1), rng.uniform(0.5, 2.0)]
        assert F.evaluate(a, b) == pytest.approx(closed_kl(a, b), rel=1e-10, abs=1e-12)


def test_kl_induces_fisher_rao():
    F = G.density.kl_contrast()
    np.testing.assert_allclose(induced_metric(F, [0.0, 1.0]), np.diag([1.0, 2.0]), atol=1e-10)
    got = induced_metric(F, PTS)
    assert np.max(np.abs(got - G.density.fisher_rao(PTS))) <= 1e-6


def test_symmetric_location_family_has_no_skewness():
    chart = Chart(("m",), box=((-1.0, 1.0),))
    logistic = DensityModel(chart, log_density="-(xi - m) - 2 * log(1 + exp(-(xi - m)))", center="m", window=40.0, nodes=400)
    T = logistic.amari_chentsov(chart.sample(5, 0))
    assert np.max(np.abs(T)) <= 1e-9
    g = logistic.fisher_rao([0.2])
    assert g[0, 0] == pytest.approx(1 / 3, rel=1e-9)


def test_normalization_error_reports_mass():
    chart = Chart(("m",))
    bad = DensityModel(chart, log_density="-(xi - m)^2 / 2", center="m")
    with pytest.raises(NormalizationError) as err:
        bad.fisher_rao([0.0])
    assert err.value.mass == pytest.approx(np.sqrt(2 * np.pi), rel=1e-10)
    with pytest.raises(ValueError):
        DensityModel(chart)
    with pytest.raises(ValueError):
        DensityModel(chart, density="1", nodes=1)


def test_density_and_log_density_forms_agree():
    chart = G.chart
    d = DensityModel(chart, density="exp(-(xi - mu)^2 / (2 * sigma^2)) / (sigma * sqrt(2 * pi))", center="mu", scale="sigma")
    np.testing.assert_allclose(d.fisher_rao(PTS), G.density.fisher_rao(PTS), rtol=1e-12, atol=1e-14)


def test_tree_sum_is_fixed_order():
    rng = np.random.default_rng(0)
    a = Jet.constant(rng.standard_normal((3, 37)))
    np.testing.assert_allclose(tree_sum(a).value, a.value.sum(-1), rtol=1e-14)
    assert np.array_equal(tree_sum(a).value, tree_sum(a).value)


def test_exponential_family_examples():
    plane = Chart(("u", "v"))
    s = exponential_family_structure("(u^2 + v^2) / 2", plane)
    p = plane.sample(4, 0)
    assert np.array_equal(s.g.at(p), np.broadcast_to(np.eye(2), (4, 2, 2)))
    assert not np.any(s.T.at(p)) and not np.any(s.alpha_connection(1.0).at(p))
    q = quartic_family().structure()
    assert q.g.at([1.0])[0, 0] == 2.0 and q.T.at([1.0])[0, 0, 0] == 2.0
    line = Chart(("x",))
    pure = exponential_family_structure("x^4/12", line)
    assert pure.g.at([1.0])[0, 0] == 1.0 and pure.T.at([1.0])[0, 0, 0] == 2.0
    assert lower_connection(pure.g, levi_civita(pure.g)).at([1.0])[0, 0, 0] == pytest.approx(1.0)


def test_gaussian_potential_reproduces_pushed_metric():
    from statlift.models import GAUSSIAN_NATURAL_PSI

    fam = ExponentialFamily(G.natural.target, GAUSSIAN_NATURAL_PSI)
    y = G.natural(PTS)
    np.testing.assert_allclose(fam.metric().at(y), transform_metric(G.natural, G.g).at(y), rtol=1e-10)
    np.testing.assert_allclose(fam.skewness().at(y), transform_tensor(G.natural, G.T).at(y), rtol=1e-9)
