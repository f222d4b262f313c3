import numpy as np
import pytest
from hypothesis import strategies as st

from cliffsheaf.metric import Metric4

ETA = Metric4.from_signature((-1, 1, 1, 1))
SIGNATURES = [(-1, 1, 1, 1), (1, -1, -1, -1)]
REPS = ("dirac", "weyl", "majorana")

finite = st.floats(-3.0, 3.0, allow_nan=False, allow_infinity=False)
vec4 = st.lists(finite, min_size=4, max_size=4).map(np.array)
small_form = st.lists(st.floats(-0.5, 0.5), min_size=4, max_size=4).map(np.array)


def non_null(eta=(-1, 1, 1, 1), min_q=1e-3):
    e = np.array(eta, float)
    return vec4.filter(lambda y: abs(np.sum(e * y * y)) > min_q)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_non_null(rng, eta=(-1, 1, 1, 1), min_q=1e-6):
    e = np.array(eta, float)
    while True:
        y = rng.normal(size=4)
        if abs(np.sum(e * y * y)) > min_q:
            return y


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
