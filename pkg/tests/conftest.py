import numpy as np
import pytest

from qmwf.corpus import CORPUS, DEFAULT_GRID
from qmwf.grid import Grid, GridSignal


@pytest.fixture(scope="session")
def corpus_signals():
    return {name: entry.build() for name, entry in CORPUS.items()}


@pytest.fixture(scope="session")
def default_grid():
    return DEFAULT_GRID


@pytest.fixture
def small_grid():
    return Grid(-32.0, 32.0, 2**12)


@pytest.fixture
def gaussian_on(small_grid):
    return GridSignal(small_grid, np.exp(-small_grid.x**2), "gauss")


_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call":
        return
    number, title = mark.args
    prev = _CRITERIA.get(number)
    passed = report.passed and (prev is None or prev[1])
    elapsed = report.duration + (prev[2] if prev else 0.0)
    _CRITERIA[number] = (title, passed, elapsed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, passed, elapsed = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}  ({elapsed:.2f} s)")
