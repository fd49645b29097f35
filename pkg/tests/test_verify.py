import json
import math

import numpy as np
import pytest

from statlift.contrast import ContrastFunction
from statlift.geometry import CovariantTensor
from statlift.modelfile import Target, builtin_target
from statlift.statistical import StatisticalStructure
from statlift.verify import (
    DEFAULT_TARGETS,
    SUITES,
    TOLERANCES,
    run_suite,
    scorecard,
    scorecard_json,
    smat_example,
)


def failed(results):
    return [c.check_id for c in results if not c.passed]


def test_unknown_suite_and_bad_arguments():
    with pytest.raises(ValueError, match="unknown suite"):
        run_suite("everything")
    with pytest.raises(ValueError, match="at least 1"):
        run_suite("statmlift", r_values=(0,))
    with pytest.raises(ValueError, match="positive"):
        run_suite("statmlift", count=0)
    with pytest.raises(ValueError, match="gaussian"):
        run_suite("gaussian_paper_values", "quartic")
    with pytest.raises(ValueError, match="potential"):
        run_suite("expfam_paper_values", "gaussian")
    with pytest.raises(ValueError, match="contrast"):
        run_suite("contrast_lift", Target("bare", builtin_target("quartic").structure))


def test_every_suite_passes_on_its_default_target():
    for suite in SUITES:
        res = run_suite(suite, count=4, seed=1)
        assert res and failed(res) == [], (suite, DEFAULT_TARGETS[suite])
        assert all(c.seed == 1 and c.points >= 1 for c in res)
        for c in res:
            assert c.passed == (c.max_defect <= c.tolerance * c.scale)


def test_run_suite_is_deterministic():
    a = run_suite("alpha_family", count=5, seed=9, r_values=(1, 2))
    b = run_suite("alpha_family", count=5, seed=9, r_values=(1, 2))
    assert [c.as_dict() for c in a] == [c.as_dict() for c in b]
    assert [c.check_id for c in a] == sorted(c.check_id for c in a)


def test_contrast_lift_on_plane_is_exact():
    res = run_suite("contrast_lift", "plane", count=5, r_values=(1, 2))
    assert failed(res) == []
    assert max(c.max_defect for c in res if c.check_id.endswith(("metric", "connection"))) == 0.0


def test_degenerate_contrast_fails_and_stops():
    s = builtin_target("quartic").structure
    cube = ContrastFunction.from_expression(s.chart, "(x_x - x_y)^3")
    t = Target("cube", s, contrast=cube)
    res = run_suite("contrast_lift", t, count=3)
    ids = {c.check_id: c for c in res}
    assert not ids["contrast_lift/base/nondegenerate"].passed
    assert math.isinf(ids["contrast_lift/base/nondegenerate"].max_defect)
    assert not any(k.startswith("contrast_lift/r=") for k in ids)


def test_statmlift_rejects_non_symmetric_cubic_form():
    base = builtin_target("plane").structure
    chart = base.chart
    comps = np.zeros((2, 2, 2), dtype=object)
    comps[0, 0, 1] = 1
    bad = StatisticalStructure(base.g, CovariantTensor.from_components(chart, comps.tolist(), valence=3))
    res = run_suite("statmlift", Target("bad", bad), count=4)
    bad_ids = failed(res)
    assert "statmlift/r=1/7_codazzi" in bad_ids and "statmlift/r=1/6_dualistic" in bad_ids


def test_smat_needs_two_dimensions():
    with pytest.raises(ValueError, match="dimension"):
        smat_example(builtin_target("quartic").structure)


def test_smat_example_is_not_a_statistical_manifold():
    res = run_suite("smat_lift", count=6)
    ids = {c.check_id: c for c in res}
    assert ids["smat_lift/base/witness"].passed and ids["smat_lift/base/witness"].max_defect == 0.0
    assert {"smat_lift/r=1/torsion_coupled", "smat_lift/r=1/dual_torsion_free"} <= set(ids)


def test_scorecard_layout():
    res = run_suite("expfam_paper_values", count=3, seed=2)
    card = scorecard("expfam_paper_values", "quartic", res, 2, (1,), 3, 200, 12.0)
    assert card["summary"] == {"total": len(res), "passed": len(res), "failed": []}
    text = scorecard_json(card)
    assert text.endswith("\n") and json.loads(text) == card
    assert text == scorecard_json(json.loads(text))


def test_tolerance_table_covers_every_suite():
    prefixes = {k.split(".")[0] for k in TOLERANCES}
    assert prefixes == set(SUITES)
    assert all(tol >= 0 for tol, _ in TOLERANCES.values())
