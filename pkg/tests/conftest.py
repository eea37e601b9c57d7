import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def random_theta(rng, n, radius):
    """Uniform point of the closed ball of the given radius."""
    v = rng.normal(size=n)
    return v / np.linalg.norm(v) * radius * rng.uniform() ** (1 / n)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[key])
