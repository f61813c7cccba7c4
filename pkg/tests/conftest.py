import numpy as np
import pytest

from pgmfunctor.network import bn_from_tables, mn_from_tables

# element 0 is the event (a, b, ...), element 1 its negation
MISCONCEPTION_FACTORS = {
    ("A", "B"): np.array([[10.0, 1.0], [5.0, 30.0]]),
    ("B", "C"): np.array([[100.0, 1.0], [1.0, 100.0]]),
    ("C", "D"): np.array([[1.0, 100.0], [100.0, 1.0]]),
    ("A", "D"): np.array([[100.0, 1.0], [1.0, 100.0]]),
}
MISCONCEPTION_EDGES = [("A", "B"), ("B", "C"), ("C", "D"), ("A", "D")]


def make_misconception():
    return mn_from_tables("ABCD", MISCONCEPTION_EDGES, dict.fromkeys("ABCD", 2), MISCONCEPTION_FACTORS)


# burglary, earthquake, alarm, radio; illustrative tables
BEAR_EDGES = [("B", "A"), ("E", "A"), ("E", "R")]
BEAR_TABLES = {
    "B": np.array([0.01, 0.99]),
    "E": np.array([0.02, 0.98]),
    # A given (B, E): axis order (A, B, E)
    "A": np.array([[[0.95, 0.94], [0.29, 0.001]], [[0.05, 0.06], [0.71, 0.999]]]),
    "R": np.array([[0.9, 0.0], [0.1, 1.0]]),
}


def make_bear():
    return bn_from_tables("BEAR", BEAR_EDGES, dict.fromkeys("BEAR", 2), BEAR_TABLES)


@pytest.fixture
def misconception():
    return make_misconception()


@pytest.fixture
def bear():
    return make_bear()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
