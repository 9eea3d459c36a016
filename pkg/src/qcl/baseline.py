"""Classical comparison: linear regression on an explicit basis, and the
Pauli transfer matrix of a circuit unitary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .qstate import all_pauli_strings, check_unitary


@dataclass(frozen=True)
class BasisSet:
    names: tuple[str, ...]
    functions: tuple[Callable[[np.ndarray], np.ndarray], ...]

    def __len__(self):
        return len(self.functions)

    def design_matrix(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1)
        return np.stack([f(x) for f in self.functions], axis=1)


def _s(x):
    return np.sqrt(1.0 - x**2)


# Product-state monomials reachable by a 3-qubit R^Y(arcsin x) encoding.
APPENDIX_BASIS = BasisSet(
    names=("x", "x^2", "x^3", "sqrt(1-x^2)", "1-x^2", "(1-x^2)^(3/2)", "x sqrt(1-x^2)", "x^2 sqrt(1-x^2)", "x(1-x^2)"),
    functions=(
        lambda x: x,
        lambda x: x**2,
        lambda x: x**3,
        _s,
        lambda x: 1.0 - x**2,
        lambda x: _s(x) ** 3,
        lambda x: x * _s(x),
        lambda x: x**2 * _s(x),
        lambda x: x * (1.0 - x**2),
    ),
)


@dataclass(frozen=True)
class LinearModel:
    basis: BasisSet
    weights: np.ndarray
    rank: int
    rank_deficient: bool

    def predict(self, x) -> np.ndarray:
        return self.basis.design_matrix(x) @ self.weights


def least_squares_fit(basis: BasisSet, x, f) -> LinearModel:
    """Minimum-norm least-squares weights via an SVD-based solver.

    ``rank_deficient`` is set when the design matrix has lower rank than the
    number of basis functions; the weights are then the minimum-norm solution.
    """
    phi = basis.design_matrix(x)
    f = np.asarray(f, dtype=float).reshape(-1)
    if phi.shape[0] < 1:
        raise ValueError("need at least one sample")
    w, _, rank, _ = np.linalg.lstsq(phi, f, rcond=None)
    return LinearModel(basis, w, int(rank), int(rank) < len(basis))


def weight_norm(model: LinearModel) -> float:
    return float(np.linalg.norm(model.weights))


def pauli_transfer_matrix(u: np.ndarray, num_qubits: int) -> np.ndarray:
    """``R[m, k] = Tr(P_m U P_k U^dag) / 2**N`` over all 4**N Pauli strings.

    Rows and columns follow :func:`qcl.qstate.all_pauli_strings` ordering.
    If ``rho = sum_k a_k P_k`` then ``U rho U^dag = sum_m (R a)_m P_m``.
    """
    if num_qubits > 3:
        raise ValueError("pauli_transfer_matrix is limited to 3 qubits")
    u = check_unitary(u, atol=1e-8)
    if u.shape[0] != 2**num_qubits:
        raise ValueError(f"unitary of dimension {u.shape[0]} for {num_qubits} qubits")
    paulis = all_pauli_strings(num_qubits)
    # columns P_m @ U and P_k @ U^dag, then Tr(P_m U P_k U^dag) = sum (P_m U)^T_ij (P_k U^dag)_ji
    left = np.stack([p.apply(u) for p in paulis])  # P_m U
    right = np.stack([p.apply(u.conj().T) for p in paulis])  # P_k U^dag
    r = np.einsum("mij,kji->mk", left, right)
    return np.real(r) / 2**num_qubits


def pauli_vector(rho: np.ndarray, num_qubits: int) -> np.ndarray:
    """Coefficients ``a_k = Tr(P_k rho) / 2**N`` of a dense operator."""
    return np.array(
        [np.real(np.trace(p.apply(rho))) for p in all_pauli_strings(num_qubits)]
    ) / 2**num_qubits


def row_norms(r: np.ndarray) -> np.ndarray:
    return np.linalg.norm(r, axis=1)


def noisy_samples(fn: Callable, n: int, noise_std: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """``n`` points uniform on [-1, 1] with Gaussian noise added to ``fn(x)``."""
    x = rng.uniform(-1.0, 1.0, n)
    return x, fn(x) + rng.normal(0.0, noise_std, n)

