"""Dense statevector engine.

Qubit 1 is the most significant bit of the basis index: for ``N`` qubits the
basis state ``|b_1 b_2 ... b_N>`` sits at index ``sum_q b_q * 2**(N - q)``.
Pauli strings are written in the same order, so ``"XI"`` acts with X on
qubit 1.

Most functions here accept either a single amplitude vector of shape
``(2**N,)`` or a batch of column vectors of shape ``(2**N, batch)``; the
batched form is what the circuit and gradient code use internally.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

MAX_QUBITS = 12
NORM_ATOL = 1e-10
UNITARY_ATOL = 1e-9

_PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class ConfigurationError(ValueError):
    """Invalid sizes or settings (qubit counts, seeds, config fields)."""


class DimensionError(ValueError):
    """Operands of incompatible dimension."""


def check_num_qubits(num_qubits: int) -> int:
    if int(num_qubits) != num_qubits or not 1 <= num_qubits <= MAX_QUBITS:
        raise ConfigurationError(
            f"num_qubits must be an integer in [1, {MAX_QUBITS}], got {num_qubits!r}"
        )
    return int(num_qubits)


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis, e.g. ``PauliString("XIZ")``."""

    letters: str

    def __post_init__(self):
        letters = self.letters.upper()
        if not letters or set(letters) - set("IXYZ"):
            raise ValueError(f"invalid Pauli string {self.letters!r}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def single(cls, num_qubits: int, qubit: int, letter: str) -> "PauliString":
        """Weight-one string with ``letter`` on ``qubit`` (0-based)."""
        if not 0 <= qubit < num_qubits:
            raise ValueError(f"qubit {qubit} out of range for {num_qubits} qubits")
        chars = ["I"] * num_qubits
        chars[qubit] = letter
        return cls("".join(chars))

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return self.letters

    @property
    def num_qubits(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        return sum(c != "I" for c in self.letters)

    @cached_property
    def flip_mask(self) -> int:
        n = len(self.letters)
        mask = 0
        for q, c in enumerate(self.letters):
            if c in "XY":
                mask |= 1 << (n - 1 - q)
        return mask

    @cached_property
    def _action(self) -> tuple[np.ndarray, np.ndarray]:
        # (P psi)[k] = phase[k] * psi[perm[k]] with perm[k] = k ^ flip_mask
        n = len(self.letters)
        idx = np.arange(2**n)
        source = idx ^ self.flip_mask
        phase = np.ones(2**n, dtype=complex)
        for q, c in enumerate(self.letters):
            bit = (source >> (n - 1 - q)) & 1
            if c == "Z":
                phase *= 1 - 2 * bit
            elif c == "Y":
                phase *= 1j * (1 - 2 * bit)
        return source, phase

    def apply(self, amps: np.ndarray) -> np.ndarray:
        """Return ``P @ amps`` without building the dense matrix."""
        perm, phase = self._action
        if amps.shape[0] != perm.size:
            raise DimensionError(
                f"Pauli string on {self.num_qubits} qubits applied to dimension {amps.shape[0]}"
            )
        if amps.ndim == 1:
            return phase * amps[perm]
        return phase[:, None] * amps[perm]

    def to_matrix(self) -> np.ndarray:
        out = np.ones((1, 1), dtype=complex)
        for c in self.letters:
            out = np.kron(out, _PAULI_MATRICES[c])
        return out


def all_pauli_strings(num_qubits: int) -> list[PauliString]:
    """All 4**N strings, ordered lexicographically over ``I, X, Y, Z``."""
    labels = [""]
    for _ in range(num_qubits):
        labels = [s + c for s in labels for c in "IXYZ"]
    return [PauliString(s) for s in labels]


class StateVector:
    """Pure state of ``num_qubits`` qubits. Amplitudes are read-only."""

    __slots__ = ("_amps",)

    def __init__(self, amplitudes, *, check: bool = True):
        amps = np.array(amplitudes, dtype=complex)
        if amps.ndim != 1:
            raise DimensionError("amplitudes must be one-dimensional")
        n = amps.size.bit_length() - 1
        if amps.size != 2**n or n < 1:
            raise DimensionError(f"length {amps.size} is not 2**N for N >= 1")
        check_num_qubits(n)
        if check:
            norm = np.linalg.norm(amps)
            if abs(norm - 1.0) > NORM_ATOL:
                raise ValueError(f"state is not normalized (norm={norm!r})")
        amps.flags.writeable = False
        self._amps = amps

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amps

    @property
    def num_qubits(self) -> int:
        return self._amps.size.bit_length() - 1

    @property
    def dim(self) -> int:
        return self._amps.size

    def norm(self) -> float:
        return float(np.linalg.norm(self._amps))

    def __repr__(self) -> str:
        return f"StateVector(num_qubits={self.num_qubits})"


def zero_state(num_qubits: int) -> StateVector:
    n = check_num_qubits(num_qubits)
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = 1.0
    return StateVector(amps, check=False)


def _check_lengths(state: StateVector, pauli: PauliString):
    if pauli.num_qubits != state.num_qubits:
        raise DimensionError(
            f"Pauli string has {pauli.num_qubits} qubits, state has {state.num_qubits}"
        )


def rotate(amps: np.ndarray, generator: PauliString, angle) -> np.ndarray:
    """Apply ``exp(-i angle P / 2)`` to an amplitude array.

    ``angle`` may be a scalar or, for batched ``amps``, an array with one
    angle per column.
    """
    half = np.asarray(angle, dtype=float) / 2
    return np.cos(half) * amps - 1j * np.sin(half) * generator.apply(amps)


def apply_pauli_rotation(state: StateVector, generator: PauliString, angle: float) -> StateVector:
    _check_lengths(state, generator)
    return StateVector(rotate(state.amplitudes, generator, float(angle)), check=False)


def check_unitary(u: np.ndarray, atol: float = UNITARY_ATOL) -> np.ndarray:
    """Validate a dense unitary (``max|U^dag U - I| <= atol``) and return it."""
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionError(f"unitary must be square, got shape {u.shape}")
    dev = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if dev > atol:
        raise ValueError(f"matrix is not unitary (max deviation {dev:.3e})")
    return u


def apply_dense_unitary(state: StateVector, u: np.ndarray) -> StateVector:
    u = np.asarray(u, dtype=complex)
    if u.shape != (state.dim, state.dim):
        raise DimensionError(f"unitary of shape {u.shape} applied to dimension {state.dim}")
    return StateVector(u @ state.amplitudes, check=False)


def expectation_values(amps: np.ndarray, observable: PauliString) -> np.ndarray:
    """``<psi|P|psi>`` for each column of a (possibly batched) amplitude array."""
    return np.real(np.sum(amps.conj() * observable.apply(amps), axis=0))


def expectation(state: StateVector, observable: PauliString) -> float:
    _check_lengths(state, observable)
    return float(expectation_values(state.amplitudes, observable))


def z_signs(num_qubits: int, qubit: int) -> np.ndarray:
    """Diagonal of Z on ``qubit`` (0-based) as a +/-1 vector."""
    bits = (np.arange(2**num_qubits) >> (num_qubits - 1 - qubit)) & 1
    return 1.0 - 2.0 * bits


def random_state(num_qubits: int, rng: np.random.Generator) -> StateVector:
    amps = rng.normal(size=2**num_qubits) + 1j * rng.normal(size=2**num_qubits)
    return StateVector(amps / np.linalg.norm(amps))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
