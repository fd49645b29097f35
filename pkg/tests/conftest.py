import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "statlift",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "statlift"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_CRITERIA = {
    1: "Gaussian golden values",
    2: "signature",
    3: "flatness",
    4: "statmlift suite",
    5: "contrast lift",
    6: "Fisher-Rao equivalences",
    7: "exponential-family Hessian law",
    8: "SMAT lift",
    9: "scalar-algebra oracles",
    10: "determinism",
}
_acceptance: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def acceptance():
    """Call ``acceptance(n, ok, detail)`` before asserting, so the summary shows every criterion."""

    def record(n, ok, detail=""):
        _acceptance[n] = (bool(ok), detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for n, name in ACCEPTANCE_CRITERIA.items():
        ok, detail = _acceptance.get(n, (False, "not run"))
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:2d} {name}: {detail}")
