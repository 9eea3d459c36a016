import json

import numpy as np
import pytest

from oracles import X, ising_dense
from qcl.hamiltonian import (
    IsingHamiltonian,
    evolution_gate,
    pauli_terms,
    propagator,
    sample_coefficients,
    to_dense,
)
from qcl.qstate import ConfigurationError, random_state


def test_sampling_is_deterministic():
    h1, h2 = sample_coefficients(6, 42), sample_coefficients(6, 42)
    np.testing.assert_array_equal(h1.a, h2.a)
    np.testing.assert_array_equal(h1.J, h2.J)
    assert not np.array_equal(h1.a, sample_coefficients(6, 43).a)


def test_counts_and_range():
    h = sample_coefficients(6, 0)
    assert h.a.size == 6
    assert len(h.couplings()) == 15
    assert np.all(np.triu(h.J) == 0)
    assert np.all(np.abs(h.a) <= 1) and np.all(np.abs(h.J) <= 1)


def test_field_distribution():
    draws = np.array([sample_coefficients(1, s).a[0] for s in range(10_000)])
    assert abs(draws.mean()) < 0.05
    assert draws.min() >= -1 and draws.max() <= 1


def test_qubit_range():
    with pytest.raises(ConfigurationError):
        sample_coefficients(13, 0)


def test_to_dense_small_cases():
    np.testing.assert_array_equal(to_dense(IsingHamiltonian(1, [0.5], [[0]])), [[0, 0.5], [0.5, 0]])
    h = IsingHamiltonian(2, [0, 0], [[0, 0], [1, 0]])
    np.testing.assert_array_equal(to_dense(h), np.diag([1, -1, -1, 1]))


@pytest.mark.parametrize("seed", range(5))
def test_to_dense_matches_term_by_term(seed):
    h = sample_coefficients(3, seed)
    dense = to_dense(h)
    assert np.max(np.abs(dense - ising_dense(h.a, h.J))) < 1e-14
    assert np.max(np.abs(dense - dense.conj().T)) < 1e-12
    terms = sum(c * p.to_matrix() for c, p in pauli_terms(h))
    assert np.max(np.abs(dense - terms)) < 1e-14


def test_evolution_time_zero_is_identity():
    g = evolution_gate(sample_coefficients(3, 1), 0.0)
    np.testing.assert_allclose(g.unitary, np.eye(8), atol=1e-12)


def test_single_spin_closed_form():
    h = IsingHamiltonian(1, [1.0], [[0]])
    for t in (0.3, np.pi / 2, 2.0):
        expected = np.cos(t) * np.eye(2) - 1j * np.sin(t) * X
        np.testing.assert_allclose(evolution_gate(h, t).unitary, expected, atol=1e-12)
    np.testing.assert_allclose(evolution_gate(h, np.pi / 2).unitary, -1j * X, atol=1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_group_properties(seed):
    h = sample_coefficients(4, seed)
    u, v = propagator(h, 3.7), propagator(h, -3.7)
    assert np.max(np.abs(u @ v - np.eye(16))) < 1e-9
    assert np.max(np.abs(u.conj().T @ u - np.eye(16))) < 1e-9
    assert np.max(np.abs(propagator(h, 1.2) @ propagator(h, 2.5) - u)) < 1e-8


def test_energy_conserved():
    h = sample_coefficients(4, 7)
    hm = to_dense(h)
    psi = random_state(4, np.random.default_rng(0)).amplitudes
    out = evolution_gate(h, 10.0).unitary @ psi
    assert abs(np.vdot(psi, hm @ psi).real - np.vdot(out, hm @ out).real) < 1e-8
    assert abs(np.linalg.norm(out) - 1) < 1e-10


def test_json_round_trip():
    h = sample_coefficients(5, 11)
    back = IsingHamiltonian.from_dict(json.loads(json.dumps(h.to_dict())))
    np.testing.assert_array_equal(back.a, h.a)
    np.testing.assert_array_equal(back.J, h.J)
    assert back.seed == 11
