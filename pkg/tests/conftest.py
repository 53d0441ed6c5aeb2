import numpy as np
import pytest

from trotterkit.hamiltonians import PAULI

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def paulis():
    return PAULI["I"], PAULI["X"], PAULI["Y"], PAULI["Z"]


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def random_state(dim, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
