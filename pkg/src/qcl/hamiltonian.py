"""Fully connected transverse-field Ising Hamiltonian and its evolution.

    H = sum_j a_j X_j + sum_{j > k} J_jk Z_j Z_k

Coefficients are drawn from numpy's default generator (PCG64) seeded with
an integer, so a seed fully determines an instance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .qstate import ConfigurationError, PauliString, check_num_qubits, check_unitary, z_signs


@dataclass(frozen=True, eq=False)
class IsingHamiltonian:
    num_qubits: int
    a: np.ndarray
    J: np.ndarray  # strictly lower-triangular, J[j, k] for j > k
    seed: int | None = None

    def __post_init__(self):
        n = check_num_qubits(self.num_qubits)
        a = np.array(self.a, dtype=float)
        J = np.array(self.J, dtype=float)
        if a.shape != (n,) or J.shape != (n, n):
            raise ConfigurationError(
                f"expected a of shape ({n},) and J of shape ({n}, {n}), got {a.shape}, {J.shape}"
            )
        J = np.tril(J, -1)
        a.flags.writeable = False
        J.flags.writeable = False
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "J", J)

    def couplings(self) -> list[tuple[int, int, float]]:
        """``(j, k, J_jk)`` for every pair j > k (0-based)."""
        n = self.num_qubits
        return [(j, k, float(self.J[j, k])) for j in range(n) for k in range(j)]

    def to_dict(self) -> dict:
        return {
            "num_qubits": self.num_qubits,
            "seed": self.seed,
            "a": self.a.tolist(),
            "J": self.J.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "IsingHamiltonian":
        return cls(data["num_qubits"], data["a"], data["J"], data.get("seed"))

    @cached_property
    def eigensystem(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues and eigenvectors of the dense matrix (cached)."""
        try:
            evals, evecs = np.linalg.eigh(to_dense(self))
        except np.linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError(f"eigendecomposition of Hamiltonian failed: {exc}") from exc
        return evals, evecs


def sample_coefficients(num_qubits: int, rng_seed: int) -> IsingHamiltonian:
    """Draw every ``a_j`` and ``J_jk`` i.i.d. uniform on [-1, 1]."""
    n = check_num_qubits(num_qubits)
    rng = np.random.default_rng(rng_seed)
    a = rng.uniform(-1.0, 1.0, size=n)
    J = np.zeros((n, n))
    rows, cols = np.tril_indices(n, -1)
    J[rows, cols] = rng.uniform(-1.0, 1.0, size=rows.size)
    return IsingHamiltonian(n, a, J, seed=int(rng_seed))


def to_dense(h: IsingHamiltonian) -> np.ndarray:
    n = h.num_qubits
    diag = np.zeros(2**n)
    for j, k, coupling in h.couplings():
        diag += coupling * z_signs(n, j) * z_signs(n, k)
    mat = np.diag(diag).astype(complex)
    idx = np.arange(2**n)
    for j in range(n):
        # X_j has unit entries at (k ^ bit_j, k)
        mat[idx ^ (1 << (n - 1 - j)), idx] += h.a[j]
    return mat


@dataclass(frozen=True, eq=False)
class EvolutionGate:
    """``exp(-i H t)`` as a dense matrix."""

    time: float
    unitary: np.ndarray = field(repr=False)
    hamiltonian: IsingHamiltonian | None = field(default=None, repr=False)

    @property
    def num_qubits(self) -> int:
        return self.unitary.shape[0].bit_length() - 1


def propagator(h: IsingHamiltonian, time: float) -> np.ndarray:
    evals, evecs = h.eigensystem
    return (evecs * np.exp(-1j * evals * time)) @ evecs.conj().T


def evolution_gate(h: IsingHamiltonian, time: float) -> EvolutionGate:
    u = check_unitary(propagator(h, float(time)))
    u.flags.writeable = False
    return EvolutionGate(float(time), u, h)


def pauli_terms(h: IsingHamiltonian) -> list[tuple[float, PauliString]]:
    """The Hamiltonian as a list of ``(coefficient, PauliString)``."""
    n = h.num_qubits
    terms = [(float(h.a[j]), PauliString.single(n, j, "X")) for j in range(n)]
    for j, k, coupling in h.couplings():
        chars = ["I"] * n
        chars[j] = chars[k] = "Z"
        terms.append((coupling, PauliString("".join(chars))))
    return terms
