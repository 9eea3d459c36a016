"""Input-state preparation.

Every encoding is a product state. Qubit ``j`` (0-based) reads feature
``j % input_dim`` and is prepared by R^Y(arcsin x) acting on |0>, optionally
followed by R^Z(arccos x**2)::

    ry_only   R^Y(arcsin x)                   Bloch vector (x, 0, sqrt(1-x^2))
    ry_rz     R^Z(arccos x^2) R^Y(arcsin x)   1-D input
    multi_dim same gates as ry_rz, feature j % input_dim on qubit j
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qstate import StateVector, all_pauli_strings, check_num_qubits, expectation_values

KINDS = ("ry_only", "ry_rz", "multi_dim")
_ALIASES = {"multi_dim_ry_rz": "multi_dim"}
MAX_COEFF_QUBITS = 4


class EncodingDomainError(ValueError):
    """Input outside [-1, 1], where the inverse trig functions are undefined."""


@dataclass(frozen=True)
class EncodingSpec:
    kind: str
    num_qubits: int
    input_dim: int = 1

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in KINDS:
            raise ValueError(f"unknown encoding kind {self.kind!r}; expected one of {KINDS}")
        object.__setattr__(self, "kind", kind)
        check_num_qubits(self.num_qubits)
        if kind != "multi_dim" and self.input_dim != 1:
            raise ValueError(f"encoding {kind!r} takes 1-D input, got input_dim={self.input_dim}")
        if not 1 <= self.input_dim <= self.num_qubits:
            raise ValueError(f"input_dim must be in [1, num_qubits], got {self.input_dim}")

    def feature_of_qubit(self, qubit: int) -> int:
        return qubit % self.input_dim


def _as_batch(spec: EncodingSpec, x) -> np.ndarray:
    xs = np.asarray(x, dtype=float)
    if xs.ndim == 0:
        xs = xs.reshape(1, 1)
    elif xs.ndim == 1:
        xs = xs.reshape(-1, 1) if spec.input_dim == 1 else xs.reshape(1, -1)
    if xs.ndim != 2 or xs.shape[1] != spec.input_dim:
        raise ValueError(f"expected inputs with {spec.input_dim} feature(s), got shape {np.shape(x)}")
    if not np.all(np.isfinite(xs)) or np.any(np.abs(xs) > 1.0):
        raise EncodingDomainError("encoding inputs must lie in [-1, 1]")
    return xs


def qubit_states(spec: EncodingSpec, x) -> np.ndarray:
    """Single-qubit factors, shape ``(batch, num_qubits, 2)``."""
    xs = _as_batch(spec, x)
    cols = xs[:, [spec.feature_of_qubit(q) for q in range(spec.num_qubits)]]
    phi = np.arcsin(cols)
    factors = np.stack([np.cos(phi / 2), np.sin(phi / 2)], axis=-1).astype(complex)
    if spec.kind != "ry_only":
        chi = np.arccos(cols**2)
        factors[..., 0] *= np.exp(-0.5j * chi)
        factors[..., 1] *= np.exp(0.5j * chi)
    return factors


def encode_batch(spec: EncodingSpec, x) -> np.ndarray:
    """Encoded states as columns, shape ``(2**N, batch)``."""
    factors = qubit_states(spec, x)
    out = factors[:, 0, :]
    for q in range(1, spec.num_qubits):
        out = (out[:, :, None] * factors[:, q, None, :]).reshape(out.shape[0], -1)
    return np.ascontiguousarray(out.T)


def encode(spec: EncodingSpec, x) -> StateVector:
    amps = encode_batch(spec, x)
    if amps.shape[1] != 1:
        raise ValueError("encode takes a single input; use encode_batch for several")
    return StateVector(amps[:, 0], check=False)


def pauli_coefficients(state: StateVector) -> dict[str, float]:
    """Coefficients ``a_k`` with ``|psi><psi| = sum_k a_k P_k``.

    Keys are Pauli labels such as ``"XZ"``; ``a_k = <P_k> / 2**N``. Only for
    ``N <= 4`` since there are 4**N terms.
    """
    n = state.num_qubits
    if n > MAX_COEFF_QUBITS:
        raise ValueError(f"pauli_coefficients is limited to {MAX_COEFF_QUBITS} qubits, got {n}")
    amps = state.amplitudes
    return {str(p): float(expectation_values(amps, p)) / 2**n for p in all_pauli_strings(n)}
