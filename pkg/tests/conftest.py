import numpy as np
import pytest

from selectlab.limit import cdf_solve, moments
from selectlab.sampler import sample

# One line per acceptance criterion, echoed at the end of the run.
ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def cdf_grid():
    grid = cdf_solve()
    assert grid.converged
    return grid


@pytest.fixture(scope="session")
def moment_table():
    return moments(200)


@pytest.fixture(scope="session")
def perfect_samples():
    """10^7 exact draws (values, taus); shared by several criteria."""
    return sample(10**7, seed=20130601, stream=0, return_tau=True)


@pytest.fixture
def record_criterion():
    def _record(num, name, ok, detail=""):
        line = "criterion %02d %-22s %s%s" % (
            num, name, "PASS" if ok else "FAIL",
            f"  ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
