import numpy as np
import pytest

from statlift.geometry import Chart, Connection, Metric, dual_connection, levi_civita, lower_connection
from statlift.models import exponential_family_structure, gaussian_structure
from statlift.statistical import (
    CouplingError,
    StatisticalStructure,
    is_codazzi,
    is_dual_pair,
    is_torsion_coupled,
    skewness_from_pair,
)
from statlift.geometry import CovariantTensor

G = gaussian_structure()
S = G.structure
PTS = G.chart.sample(20, seed=42)
PLANE = Chart(("u", "v"))
I2 = Metric.from_components(PLANE, [[1, 0], [0, 1]])


def test_alpha_zero_is_levi_civita():
    assert np.array_equal(S.alpha_connection(0.0).at(PTS), levi_civita(S.g).at(PTS))


@pytest.mark.parametrize("alpha", [-1.0, 0.0, 0.5, 1.0, 2.0])
def test_gaussian_alpha_connection_closed_form(alpha):
    got = S.alpha_connection(alpha).at(PTS)
    s = PTS[:, 1]
    assert got[:, 0, 0, 1] == pytest.approx(-(alpha + 1) / s, rel=1e-13)
    assert got[:, 0, 1, 0] == pytest.approx(-(alpha + 1) / s, rel=1e-13)
    assert got[:, 1, 1, 1] == pytest.approx(-(2 * alpha + 1) / s, rel=1e-13)
    assert got[:, 1, 0, 0] == pytest.approx((1 - alpha) / (2 * s), rel=1e-13, abs=1e-15)
    assert np.all(got[:, 0, 0, 0] == 0) and np.all(got[:, 1, 0, 1] == 0)


@pytest.mark.parametrize("alpha", [-1.0, -0.5, 0.5, 1.0, 2.0])
def test_alpha_pairs_are_dual(alpha):
    rep = is_dual_pair(S.g, S.alpha_connection(alpha), S.alpha_connection(-alpha), PTS)
    assert rep.passed and rep.points == 20
    assert rep.details["torsion"] <= 1e-13


def test_alpha_relation_and_midpoint():
    lc = lower_connection(S.g, levi_civita(S.g)).at(PTS)
    for alpha in (0.5, 1.0, 2.0):
        lo = lower_connection(S.g, S.alpha_connection(alpha)).at(PTS)
        lo_m = lower_connection(S.g, S.alpha_connection(-alpha)).at(PTS)
        np.testing.assert_allclose(lo - lc, -0.5 * alpha * S.T.at(PTS), atol=1e-12)
        assert np.max(np.abs(0.5 * (lo + lo_m) - lc)) <= 1e-12


def test_skewness_round_trip():
    T = skewness_from_pair(S.g, S.alpha_connection(1.0), PTS)
    np.testing.assert_allclose(T.at(PTS), S.T.at(PTS), rtol=1e-10, atol=1e-10)
    t = T.at([0.0, 1.0])
    assert t[0, 0, 1] == pytest.approx(2.0) and t[1, 1, 1] == pytest.approx(8.0)
    assert np.max(np.abs(skewness_from_pair(S.g, levi_civita(S.g)).at(PTS))) <= 1e-12


def test_exponential_family_flat_and_third_derivative():
    chart = Chart(("x",), box=((-1.5, 1.5),))
    s = exponential_family_structure("x^4/12 + x^2/2", chart)
    p = chart.sample(10, 0)
    assert np.max(np.abs(s.alpha_connection(1.0).at(p))) <= 1e-10
    T = skewness_from_pair(s.g, s.alpha_connection(1.0), p)
    np.testing.assert_allclose(T.at(p)[:, 0, 0, 0], 2 * p[:, 0], atol=1e-12)


def test_codazzi_examples():
    assert is_codazzi(S.g, levi_civita(S.g), PTS).passed
    for alpha in (-2.0, 0.3, 1.0):
        assert is_codazzi(S.g, S.alpha_connection(alpha), PTS).passed
    bad = Connection.from_components(PLANE, [[[0, 1], [0, 0]], [[0, 0], [0, 0]]])
    rep = is_codazzi(I2, bad, PLANE.sample(5, 0))
    assert not rep.passed and rep.max_defect == pytest.approx(1.0)
    with pytest.raises(CouplingError) as err:
        skewness_from_pair(I2, bad, PLANE.sample(5, 0))
    assert err.value.defect == pytest.approx(1.0)


def test_dual_pair_negative_control():
    rep = is_dual_pair(S.g, S.alpha_connection(1.0), S.alpha_connection(1.0), PTS)
    assert not rep.passed
    assert is_dual_pair(S.g, levi_civita(S.g), levi_civita(S.g), PTS).passed


def test_torsion_coupling():
    assert is_torsion_coupled(S.g, S.alpha_connection(0.5), PTS).passed
    assert is_torsion_coupled(S.g, dual_connection(S.g, S.alpha_connection(0.5)), PTS).passed
    bad = Connection.from_components(PLANE, [[[0, 0], [0, 1]], [[0, 0], [0, 0]]])
    rep = is_torsion_coupled(I2, bad, PLANE.sample(5, 0))
    assert not rep.passed
    assert not is_codazzi(I2, bad, PLANE.sample(5, 0)).passed


def test_smat_pair_with_torsion():
    # a dual of a torsion-free non-Codazzi connection has torsion but is torsion coupled
    nab = Connection.from_components(PLANE, [[[0, 0], [0, "1 + u^2"]], [[0, 0], [0, 0]]])
    star = dual_connection(I2, nab)
    p = PLANE.sample(10, 1)
    rep = is_torsion_coupled(I2, star, p)
    assert rep.passed and rep.details["dual_torsion"] <= 1e-13
    assert not is_codazzi(I2, star, p).passed


def test_structure_validation():
    line = Chart(("x",))
    g = Metric.from_components(line, [[1]])
    with pytest.raises(ValueError):
        StatisticalStructure(g, CovariantTensor.from_components(line, [[1]]))
    with pytest.raises(ValueError):
        StatisticalStructure(g, CovariantTensor.from_components(Chart(("x",)), [[[1]]]))


def test_report_serializes():
    d = is_codazzi(S.g, S.alpha_connection(1.0), PTS).as_dict()
    assert d["passed"] is True and d["points"] == 20 and len(d["argmax"]) == 2
