import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_hermitian(rng, p, pd=False):
    B = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
    if pd:
        return B @ B.conj().T / p + 0.1 * np.eye(p)
    return 0.5 * (B + B.conj().T)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
