import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fluxmix import CircuitParams, analyze  # noqa: E402

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def params():
    return CircuitParams()


@pytest.fixture(scope="session")
def td_at():
    cache = {}

    def get(f):
        if f not in cache:
            cache[f] = analyze(CircuitParams(f=f))[1]
        return cache[f]

    return get


def pytest_terminal_summary(terminalreporter):
    reports = [r for key in ("passed", "failed") for r in terminalreporter.stats.get(key, [])
               if getattr(r, "when", "") == "call" and "test_acceptance.py::test_criterion" in r.nodeid]
    if not reports:
        return
    terminalreporter.section("acceptance criteria")
    for r in sorted(reports, key=lambda r: r.nodeid):
        name = r.nodeid.split("::")[-1].removeprefix("test_")
        terminalreporter.write_line(f"{'PASS' if r.passed else 'FAIL'}  {name}")


@pytest.fixture(scope="session")
def full_table():
    """Default 601-point sweep with every susceptibility column (shared with the figure code)."""
    from fluxmix.config import RunConfig
    from fluxmix.figures import _full_sweep

    return _full_sweep(RunConfig())


def local_maxima(y):
    import numpy as np

    y = np.asarray(y)
    return [i for i in range(1, len(y) - 1) if y[i] > y[i - 1] and y[i] >= y[i + 1]]
