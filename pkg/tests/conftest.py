import numpy as np
import pytest
from scipy.ndimage import gaussian_filter

_ACCEPTANCE_LINES = []


def random_texture(rng, n=64, m=None):
    """Smooth random field with a random amplitude, centered in [0.3, 0.7].

    Amplitudes span the range where the structure term is neither zero nor
    saturated, so discrepancy maps are non-trivial.
    """
    m = m or n
    amp = rng.uniform(0.005, 0.2)
    x = gaussian_filter(rng.standard_normal((n, m)), rng.uniform(0.0, 3.0))
    x /= x.std() + 1e-12
    return np.clip(rng.uniform(0.3, 0.7) + amp * x, 0.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
