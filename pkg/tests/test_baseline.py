import numpy as np
import pytest

from conftest import make_circuit
from oracles import X, pauli_matrix
from qcl.ansatz import init_theta
from qcl.baseline import (
    APPENDIX_BASIS,
    BasisSet,
    LinearModel,
    least_squares_fit,
    pauli_transfer_matrix,
    pauli_vector,
    row_norms,
    weight_norm,
)
from qcl.qstate import all_pauli_strings, random_unitary


def test_appendix_basis_definition():
    x = np.array([-0.6, 0.0, 0.3])
    s = np.sqrt(1 - x**2)
    expected = np.stack([x, x**2, x**3, s, 1 - x**2, s**3, x * s, x**2 * s, x * (1 - x**2)], axis=1)
    assert len(APPENDIX_BASIS) == 9
    np.testing.assert_allclose(APPENDIX_BASIS.design_matrix(x), expected, atol=1e-15)


def test_appendix_basis_spans_seven_dimensions():
    x = np.linspace(-0.95, 0.95, 30)
    assert np.linalg.matrix_rank(APPENDIX_BASIS.design_matrix(x)) == 7


def test_exactly_representable_target():
    x = np.linspace(-1, 1, 20)
    basis = BasisSet(APPENDIX_BASIS.names[:3], APPENDIX_BASIS.functions[:3])
    model = least_squares_fit(basis, x, 2 * x)
    np.testing.assert_allclose(model.weights, [2, 0, 0], atol=1e-8)
    assert not model.rank_deficient


def test_exact_representation_in_appendix_basis():
    # x is in the span, but x(1-x^2) = x - x^3 makes the columns dependent:
    # the min-norm weights reproduce 2x exactly without being (2, 0, ..., 0)
    x = np.linspace(-1, 1, 20)
    model = least_squares_fit(APPENDIX_BASIS, x, 2 * x)
    assert model.rank_deficient and model.rank == 7
    np.testing.assert_allclose(model.predict(x), 2 * x, atol=1e-10)


def test_interpolates_when_samples_at_most_rank():
    rng = np.random.default_rng(0)
    x = rng.uniform(-1, 1, 7)
    f = 0.5 * np.sin(x) + rng.normal(0, 0.05, 7)
    model = least_squares_fit(APPENDIX_BASIS, x, f)
    assert np.max(np.abs(model.predict(x) - f)) < 1e-8


def test_weight_norm():
    assert weight_norm(LinearModel(APPENDIX_BASIS, np.zeros(9), 7, True)) == 0
    w = np.zeros(9)
    w[:2] = [3, 4]
    assert weight_norm(LinearModel(APPENDIX_BASIS, w, 7, True)) == 5
    perm = np.random.default_rng(0).permutation(9)
    assert weight_norm(LinearModel(APPENDIX_BASIS, w[perm], 7, True)) == 5


def test_transfer_matrix_identity_and_x():
    np.testing.assert_allclose(pauli_transfer_matrix(np.eye(4), 2), np.eye(16), atol=1e-15)
    r = pauli_transfer_matrix(X, 1)
    labels = [str(p) for p in all_pauli_strings(1)]
    iz, ix = labels.index("Z"), labels.index("X")
    assert r[iz, iz] == pytest.approx(-1)
    assert r[ix, ix] == pytest.approx(1)
    np.testing.assert_allclose(r, np.diag([1, 1, -1, -1]), atol=1e-15)


def test_transfer_matrix_entries_against_trace():
    u = random_unitary(4, np.random.default_rng(3))
    r = pauli_transfer_matrix(u, 2)
    labels = [str(p) for p in all_pauli_strings(2)]
    for m in (0, 5, 11):
        for k in (2, 7, 15):
            ref = np.trace(pauli_matrix(labels[m]) @ u @ pauli_matrix(labels[k]) @ u.conj().T).real / 4
            assert r[m, k] == pytest.approx(ref, abs=1e-13)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_transfer_matrix_orthogonal_and_maps_coefficients(n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        c = make_circuit(n=n, depth=2, seed=int(rng.integers(100)))
        u = c.unitary(init_theta(c, int(rng.integers(100))))
        r = pauli_transfer_matrix(u, n)
        assert np.max(np.abs(r.T @ r - np.eye(4**n))) < 1e-9
        assert np.max(np.abs(row_norms(r) - 1)) < 1e-9
        a = rng.normal(size=(2**n, 2**n)) + 1j * rng.normal(size=(2**n, 2**n))
        rho = a @ a.conj().T
        rho /= np.trace(rho)
        b = pauli_vector(u @ rho @ u.conj().T, n)
        assert np.max(np.abs(r @ pauli_vector(rho, n) - b)) < 1e-9


def test_transfer_matrix_rejects_non_unitary():
    with pytest.raises(ValueError):
        pauli_transfer_matrix(np.diag([1.0, 1.1]), 1)
    with pytest.raises(ValueError):
        pauli_transfer_matrix(np.eye(16), 4)
