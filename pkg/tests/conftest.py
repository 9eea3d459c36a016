import numpy as np
import pytest

from qcl.ansatz import Circuit
from qcl.encoding import EncodingSpec
from qcl.hamiltonian import evolution_gate, sample_coefficients


def make_circuit(n=2, depth=1, time=10.0, kind="ry_rz", seed=0, input_dim=1):
    h = sample_coefficients(n, seed)
    return Circuit(n, depth, EncodingSpec(kind, n, input_dim), evolution_gate(h, time))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


_VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    """Record and print one PASS/FAIL line for an acceptance criterion."""

    def record(number, passed, detail):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        _VERDICTS.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_VERDICTS, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
