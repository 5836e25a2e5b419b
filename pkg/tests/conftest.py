import warnings

import numpy as np
import pytest
from hypothesis import settings

from truncfit.estimator import compute_moments, fit
from truncfit.model import TruncatedModel
from truncfit.quadrature import Interval
from truncfit.synth import SamplerConfig, sample

settings.register_profile("default", max_examples=40, deadline=None)
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile("default")

# filled by tests/test_acceptance.py, printed at the end of the session
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def normal_sample():
    """1000 draws from (alpha=2, psi=0.5) on [-3, 3]: a well-conditioned fit."""
    iv = Interval(-3.0, 3.0)
    y = sample(TruncatedModel(2.0, 0.5, iv), 1000, SamplerConfig(seed=11))
    return y, iv


@pytest.fixture(scope="session")
def normal_fit(normal_sample):
    y, iv = normal_sample
    s = compute_moments(y)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        return s, fit(s, iv)


def uniform_moments(lo: float, hi: float, n: int = 1000):
    """Exact raw moments of the uniform law on [lo, hi] as SampleMoments."""
    from truncfit.estimator import SampleMoments

    m = [(hi ** (k + 1) - lo ** (k + 1)) / ((k + 1) * (hi - lo)) for k in range(1, 5)]
    return SampleMoments(n, *m)


def rel_err(a, b):
    return np.abs(np.asarray(a) - np.asarray(b)) / np.maximum(np.abs(np.asarray(b)), 1e-300)
