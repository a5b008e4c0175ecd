import numpy as np
import pytest

from gammarul.conjugate import auto_hyperparams, posterior_update_agg
from gammarul.data import DegradationDataset, MeasurementGrid
from gammarul.fixtures import load_fixture


@pytest.fixture(scope="session")
def laser():
    return load_fixture("laser")


@pytest.fixture(scope="session")
def wheel():
    return load_fixture("wheel")


@pytest.fixture(scope="session")
def laser_posterior(laser):
    return posterior_update_agg(auto_hyperparams(laser, 1.0), laser)


def random_dataset(rng, n, m, alpha=0.5, beta=2.0, spacing=1.0, lags=None):
    grid = MeasurementGrid.from_lags(lags) if lags is not None else MeasurementGrid.regular(spacing, m)
    shape = alpha * grid.lags
    y = rng.gamma(np.broadcast_to(shape, (n, grid.m))) / np.broadcast_to(np.atleast_1d(beta), (n,))[:, None]
    return DegradationDataset(grid, np.maximum(y, 1e-300))


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one verdict line per acceptance criterion, then assert it."""

    def record(number, title, failures, detail=""):
        verdict = "PASS" if not failures else "FAIL"
        line = f"criterion {number} {verdict}: {title}" + (f" ({detail})" if detail else "")
        if failures:
            line += " -- " + "; ".join(failures)
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert not failures, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
