import numpy as np
import pytest

SIGNATURES = {
    "I1": np.eye(1),
    "-I1": -np.eye(1),
    "I2": np.eye(2),
    "j11": np.diag([1.0, -1.0]),
    "-I2": -np.eye(2),
    "j12": np.diag([1.0, -1.0, -1.0]),
}


def maxdiff(a, b):
    """Largest entrywise gap between two matrices or two lists of matrices."""
    if isinstance(a, (list, tuple)):
        return max(maxdiff(x, y) for x, y in zip(a, b))
    return float(np.abs(np.asarray(a) - np.asarray(b)).max())


def disk_point(rng, radius):
    return radius * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=sorted(SIGNATURES))
def J(request):
    return SIGNATURES[request.param]


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
