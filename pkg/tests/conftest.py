import numpy as np
import pytest

from ripe import discretize
from ripe.core import Dataset
from ripe.experiment import ExperimentConfig, run


def make_dataset(X, y, m_n=5):
    X = np.asarray(X, dtype=float)
    return Dataset.from_arrays(X, y, discretize.fit(X, m_n))


@pytest.fixture
def toy_dataset():
    # 8 rows, two features with four levels each
    X = np.array([[0, 0], [0, 1], [1, 2], [1, 3], [2, 0], [2, 2], [3, 1], [3, 3]], dtype=float)
    y = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0])
    return make_dataset(X, y, m_n=4)


@pytest.fixture(scope="session")
def circle_report():
    return run(ExperimentConfig(kind="circle", n=5000, d=10, seed=42))


@pytest.fixture(scope="session")
def linear_report():
    return run(ExperimentConfig(kind="linear", n=500, d=50, p=3, noise_sd=10.0, seed=42))


def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, config):
    if config.acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in config.acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def check(number, title, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} [{number}] {title}: {detail}"
        request.config.acceptance_lines.append(line)
        print(line)
        assert ok, line

    return check
