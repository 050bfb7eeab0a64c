import numpy as np
import pytest
from hypothesis import settings

from allpass.noise import GaussianMixture, Laplace, Logistic, StudentT

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


SHIPPED_NOISES = [
    Laplace(1.0),
    Logistic(1.0),
    StudentT(3, 1.0),
    StudentT(6, 2.5),
    GaussianMixture(),
]


def random_causal(rng, p, max_pacf=0.8):
    from allpass.residuals import pacf_to_phi

    return pacf_to_phi(rng.uniform(-max_pacf, max_pacf, size=p))


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance(request):
    """Record a one-line PASS/FAIL verdict for an acceptance criterion."""

    def record(number, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
