import os

import pytest

from parqc.circuit import read_qasm

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture(scope="session")
def example6q():
    """29-gate, depth-6, density-1.0 circuit with 3 grid-infeasible CNOTs."""
    return read_qasm(os.path.join(DATA_DIR, "example6q.qasm"))


@pytest.fixture()
def example6q_path():
    return os.path.join(DATA_DIR, "example6q.qasm")
