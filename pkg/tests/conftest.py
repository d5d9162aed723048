import numpy as np
import pytest

from qaoalab.ising import to_ising
from qaoalab.lar import reference_assignment, reference_instance
from qaoalab.qubo import encode_qubo
from qaoalab.simulator import precompute_energies

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def ref():
    return reference_instance()


@pytest.fixture(scope="session")
def ref_assignment():
    return reference_assignment()


@pytest.fixture(scope="session")
def ref_qubo(ref):
    return encode_qubo(ref.graph, ref.policy)


@pytest.fixture(scope="session")
def ref_ising(ref_qubo):
    return to_ising(ref_qubo)


@pytest.fixture(scope="session")
def ref_table(ref_ising):
    return precompute_energies(ref_ising)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fitted_ref(ref_qubo):
    """Full-budget (p=5, 1000 evaluations) fit of the reference QUBO."""
    from qaoalab.estimator import QAOASolver

    return QAOASolver(p=5, max_evals=1000, random_state=0).fit(ref_qubo)
