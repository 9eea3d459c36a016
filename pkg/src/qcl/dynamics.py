"""Teacher data from exact many-spin Ising dynamics.

The spins start in |0...0>, evolve under a random fully connected
transverse-field Ising Hamiltonian, and the Z expectation values of a few
spins are recorded in the window [t_transient, t_transient + window],
mapped onto x in [-1, 1] by ``t = (window / 2) (x + 1) + t_transient``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonian import IsingHamiltonian, sample_coefficients
from .learn import Dataset
from .qstate import ConfigurationError, z_signs


@dataclass(frozen=True)
class DynamicsTask:
    teacher_qubits: int = 10
    observed_spins: tuple[int, ...] = (0, 1, 2)  # 0-based
    transient: float = 300.0
    window: float = 8.0
    samples: int = 100

    def __post_init__(self):
        object.__setattr__(self, "observed_spins", tuple(int(s) for s in self.observed_spins))
        if any(not 0 <= s < self.teacher_qubits for s in self.observed_spins):
            raise ConfigurationError(f"observed spins {self.observed_spins} out of range")
        if self.samples < 2:
            raise ConfigurationError("need at least 2 samples")

    def time_of(self, x) -> np.ndarray:
        return self.window / 2 * (np.asarray(x, dtype=float) + 1.0) + self.transient


def spin_expectations(h: IsingHamiltonian, times, spins) -> np.ndarray:
    """``<Z_s>(t)`` for |0...0> evolved under ``h``; shape ``(len(times), len(spins))``.

    Diagonalizes once and applies ``exp(-i lambda t)`` per time.
    """
    evals, evecs = h.eigensystem
    n = h.num_qubits
    times = np.atleast_1d(np.asarray(times, dtype=float))
    overlaps = evecs[0, :].conj()  # <E_k|0...0>
    states = evecs @ (np.exp(-1j * np.outer(evals, times)) * overlaps[:, None])
    probs = np.abs(states) ** 2
    return np.stack([z_signs(n, s) @ probs for s in spins], axis=1)


def generate_teacher(
    task: DynamicsTask,
    hamiltonian_seed: int,
    circuit_seed: int | None = None,
    with_test: bool = True,
) -> tuple[Dataset, IsingHamiltonian]:
    """Sample teacher curves on a uniform x grid.

    Training inputs are ``task.samples`` evenly spaced points on [-1, 1]; the
    held-out inputs are the midpoints between them.
    """
    if circuit_seed is not None and int(circuit_seed) == int(hamiltonian_seed):
        raise ConfigurationError(
            "teacher Hamiltonian seed must differ from the circuit Hamiltonian seed"
        )
    h = sample_coefficients(task.teacher_qubits, hamiltonian_seed)
    x = np.linspace(-1.0, 1.0, task.samples)
    f = spin_expectations(h, task.time_of(x), task.observed_spins)
    if not with_test:
        return Dataset.from_splits(x, f), h
    xt = (x[1:] + x[:-1]) / 2
    ft = spin_expectations(h, task.time_of(xt), task.observed_spins)
    return Dataset.from_splits(x, f, xt, ft), h
