import csv
import io
import json
import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from statlift.cli import EXIT_CHECK, EXIT_DOMAIN, EXIT_OK, EXIT_PARSE, main

DEFS = Path(__file__).resolve().parent.parent / "defs"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def objects(doc, k=0):
    return {name: np.array(o["data"]).reshape(o["shape"]) for name, o in doc["evaluations"][k]["objects"].items()}


def test_model_gaussian(capsys):
    code, out, _ = run(capsys, "model", "--name", "gaussian", "--point", "0,1")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["schema_version"] == 1 and doc["chart"] == {"coordinates": ["mu", "sigma"], "base": ["mu", "sigma"], "r": 0}
    o = objects(doc)
    assert o["metric"].tolist() == [[1, 0], [0, 2]]
    assert o["skewness"][1, 1, 1] == 8 and o["skewness"][0, 0, 1] == 2
    assert doc["evaluations"][0]["objects"]["connection"]["index_order"] == "kij"
    np.testing.assert_allclose(o["connection"][1, 1, 1], -3)
    np.testing.assert_allclose(o["dual_connection"][1, 1, 1], 1)


def test_lift_gaussian(capsys):
    code, out, _ = run(capsys, "lift", "--r", "1", "--name", "gaussian", "--jet", "0,1,0,0")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["r"] == 1 and doc["chart"]["coordinates"] == ["(mu,0)", "(sigma,0)", "(mu,1)", "(sigma,1)"]
    g = objects(doc)["metric"]
    assert g[:2, 2:].tolist() == [[1, 0], [0, 2]] and g[2:, :2].tolist() == [[1, 0], [0, 2]]
    assert not g[:2, :2].any() and not g[2:, 2:].any()


def test_induce_from_file(capsys):
    code, out, _ = run(capsys, "induce", "--file", str(DEFS / "exp_quadratic.model"), "--point", "0")
    assert code == EXIT_OK
    o = objects(json.loads(out))
    assert o["metric"].item() == 1 and o["connection"].item() == 2
    assert o["dual_connection"].item() == -1 and o["skewness"].item() == 3


def test_sampled_points_record_seed(capsys):
    _, out, _ = run(capsys, "model", "--name", "quartic", "--count", "3", "--seed", "5")
    doc = json.loads(out)
    assert doc["seed"] == 5 and doc["count"] == 3 and len(doc["evaluations"]) == 3


def test_csv_output(capsys, tmp_path):
    target = tmp_path / "out.csv"
    code, out, _ = run(capsys, "lift", "--name", "plane", "--r", "2", "--jet", "0,0,1,1,2,2", "--format", "csv", "--out", str(target))
    assert code == EXIT_OK and out == ""
    rows = list(csv.DictReader(io.StringIO(target.read_text())))
    assert set(rows[0]) == {"point", "object", "component", "value"}
    metric = {r["component"]: float(r["value"]) for r in rows if r["object"] == "metric"}
    assert metric["(u,0)|(u,2)"] == 1.0 and metric["(u,1)|(u,1)"] == 1.0 and metric["(u,0)|(u,1)"] == 0.0


def test_check_scorecard_and_determinism(capsys):
    argv = ("check", "--suite", "statmlift", "--name", "gaussian", "--r", "2", "--seed", "7")
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == EXIT_OK and out1 == out2
    card = json.loads(out1)
    assert card["suite"] == "statmlift" and card["seed"] == 7 and card["r_values"] == [2]
    assert card["summary"]["failed"] == [] and card["summary"]["total"] == len(card["checks"]) == 7
    ids = [c["check_id"] for c in card["checks"]]
    assert ids == sorted(ids)


def test_check_failure_exit_code(capsys, tmp_path):
    bad = tmp_path / "cube.model"
    bad.write_text("schema_version = 1\nname = cube\n[chart]\ncoordinates = x\n[contrast]\nF = (x_x - x_y)^3\n")
    code, out, _ = run(capsys, "check", "--suite", "contrast_lift", "--file", str(bad))
    assert code == EXIT_CHECK
    card = json.loads(out)
    assert any("nondegenerate" in c for c in card["summary"]["failed"])


def test_check_csv(capsys):
    code, out, _ = run(capsys, "check", "--suite", "smat_lift", "--format", "csv")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "check_id,passed,max_defect,tolerance,scale,points,seed"


@pytest.mark.parametrize(
    "argv,code,needle",
    [
        (("model", "--name", "cauchy", "--point", "0"), EXIT_PARSE, "unknown model"),
        (("model", "--name", "gaussian", "--point", "0,1,2"), EXIT_PARSE, "needs 2 coordinates"),
        (("model", "--name", "gaussian", "--point", "0,x"), EXIT_PARSE, "comma-separated"),
        (("model", "--name", "gaussian", "--point", "0,-1"), EXIT_DOMAIN, "outside the chart"),
        (("model", "--point", "0,1"), EXIT_PARSE, "--name or --file"),
        (("lift", "--name", "gaussian", "--r", "1,2", "--jet", "0,1,0,0"), EXIT_PARSE, "single order"),
        (("lift", "--name", "gaussian", "--point", "0,1"), EXIT_PARSE, "use --jet"),
        (("induce", "--name", "plane", "--jet", "0,0,0,0"), EXIT_PARSE, "use --point"),
        (("check", "--suite", "nope"), EXIT_PARSE, "unknown suite"),
        (("check",), EXIT_PARSE, "needs --suite"),
        (("model", "--file", "/nonexistent/x.model", "--point", "0"), EXIT_PARSE, "No such file"),
    ],
)
def test_error_exit_codes(capsys, argv, code, needle):
    got, _, err = run(capsys, *argv)
    assert got == code and needle in err


def test_parse_error_has_position(capsys, tmp_path):
    f = tmp_path / "bad.model"
    f.write_text("schema_version = 1\n[chart]\ncoordinates = x\n[potential]\npsi = x^^2\n")
    code, _, err = run(capsys, "model", "--file", str(f), "--point", "0")
    assert code == EXIT_PARSE and "line 5, column 9" in err


def test_degenerate_point_reported(capsys, tmp_path):
    f = tmp_path / "deg.model"
    f.write_text("schema_version = 1\n[chart]\ncoordinates = x\n[potential]\npsi = x^4\n")
    code, _, err = run(capsys, "model", "--file", str(f), "--point", "0.5", "--point", "0")
    assert code == EXIT_DOMAIN and "at point [0.0]" in err


@pytest.mark.skipif(shutil.which("statlift") is None, reason="console script not installed")
def test_console_script_byte_identical(tmp_path):
    argv = ["statlift", "check", "--suite", "alpha_family", "--seed", "3"]
    a = subprocess.run(argv, capture_output=True, check=False)
    b = subprocess.run(argv, capture_output=True, check=False)
    assert a.returncode == 0 and a.stdout == b.stdout and a.stdout


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "statlift.cli", "model", "--name", "plane", "--point", "0,0"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert res.returncode == 0 and json.loads(res.stdout)["model"] == "plane"
