import numpy as np
import pytest

from oracles import Z, ising_dense, single
from qcl.dynamics import DynamicsTask, generate_teacher, spin_expectations
from qcl.hamiltonian import sample_coefficients
from qcl.qstate import ConfigurationError
from scipy.linalg import expm


def test_time_mapping():
    task = DynamicsTask()
    np.testing.assert_allclose(task.time_of([-1.0, 0.0, 1.0]), [300.0, 304.0, 308.0])


def test_initial_state_has_all_spins_up():
    h = sample_coefficients(10, 5)
    z = spin_expectations(h, [0.0], range(10))
    np.testing.assert_allclose(z, 1.0, atol=1e-10)


def test_against_expm_oracle():
    h = sample_coefficients(4, 2)
    times = [0.5, 3.0, 12.0]
    z = spin_expectations(h, times, [0, 2, 3])
    hm = ising_dense(h.a, h.J)
    psi0 = np.zeros(16, complex)
    psi0[0] = 1
    for i, t in enumerate(times):
        psi = expm(-1j * t * hm) @ psi0
        for j, s in enumerate([0, 2, 3]):
            assert z[i, j] == pytest.approx(np.real(psi.conj() @ single(4, s, Z) @ psi), abs=1e-10)


def test_teacher_dataset():
    task = DynamicsTask()
    ds, h = generate_teacher(task, hamiltonian_seed=1, circuit_seed=0)
    x, f = ds.train()
    assert x.shape == (100, 1) and f.shape == (100, 3)
    np.testing.assert_allclose(x[:, 0], np.linspace(-1, 1, 100))
    assert np.all(np.abs(f) <= 1 + 1e-12)
    assert np.max(np.abs(np.diff(f, axis=0))) < 0.5
    xt, _ = ds.test()
    assert set(ds.train_idx).isdisjoint(ds.test_idx)
    assert np.all((xt > -1) & (xt < 1))
    assert h.num_qubits == 10


def test_norm_preserved_during_window():
    h = sample_coefficients(10, 1)
    evals, evecs = h.eigensystem
    for t in DynamicsTask().time_of(np.linspace(-1, 1, 7)):
        psi = evecs @ (np.exp(-1j * evals * t) * evecs[0].conj())
        assert abs(np.linalg.norm(psi) - 1) < 1e-9


def test_seed_collision_rejected():
    with pytest.raises(ConfigurationError):
        generate_teacher(DynamicsTask(samples=5), hamiltonian_seed=3, circuit_seed=3)
    with pytest.raises(ConfigurationError):
        DynamicsTask(observed_spins=(0, 10))
