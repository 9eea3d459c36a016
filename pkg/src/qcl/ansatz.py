"""Layered circuit: input encoding, then ``depth`` layers of (Ising evolution,
single-qubit X-Z-X rotations on every qubit).

Parameters are laid out layer-major, then qubit, then rotation slot::

    index = (layer * num_qubits + qubit) * 3 + slot     slot 0: X, 1: Z, 2: X

and within a layer the rotations of a qubit are applied in slot order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .encoding import EncodingSpec, encode_batch
from .hamiltonian import EvolutionGate
from .qstate import DimensionError, PauliString, expectation_values

ROTATION_AXES = ("X", "Z", "X")


class Rotation(NamedTuple):
    generator: PauliString
    angle: float
    index: int


class Dense(NamedTuple):
    unitary: np.ndarray


@dataclass(frozen=True, eq=False)
class Circuit:
    num_qubits: int
    depth: int
    encoding: EncodingSpec
    evolution: EvolutionGate
    generators: tuple[PauliString, ...] = field(init=False, repr=False)

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")
        if self.encoding.num_qubits != self.num_qubits:
            raise DimensionError("encoding and circuit disagree on the number of qubits")
        if self.evolution.unitary.shape != (2**self.num_qubits,) * 2:
            raise DimensionError("evolution unitary does not match the number of qubits")
        gens = tuple(
            PauliString.single(self.num_qubits, q, axis)
            for _ in range(self.depth)
            for q in range(self.num_qubits)
            for axis in ROTATION_AXES
        )
        object.__setattr__(self, "generators", gens)

    @property
    def num_params(self) -> int:
        return 3 * self.num_qubits * self.depth

    def operations(self, theta) -> list[Rotation | Dense]:
        """Gates in chronological order (encoding excluded)."""
        theta = check_theta(self, theta)
        ops: list[Rotation | Dense] = []
        for layer in range(self.depth):
            ops.append(Dense(self.evolution.unitary))
            start = layer * self.num_qubits * 3
            for i in range(start, start + 3 * self.num_qubits):
                ops.append(Rotation(self.generators[i], float(theta[i]), i))
        return ops

    def unitary(self, theta) -> np.ndarray:
        """Dense matrix of the trainable part U(theta)."""
        dim = 2**self.num_qubits
        return evolve(self, theta, np.eye(dim, dtype=complex))


def param_index(circuit: Circuit, layer: int, qubit: int, slot: int) -> int:
    if not (0 <= layer < circuit.depth and 0 <= qubit < circuit.num_qubits and 0 <= slot < 3):
        raise IndexError(f"no parameter at layer={layer}, qubit={qubit}, slot={slot}")
    return (layer * circuit.num_qubits + qubit) * 3 + slot


def check_theta(circuit: Circuit, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (circuit.num_params,):
        raise DimensionError(f"expected {circuit.num_params} parameters, got shape {theta.shape}")
    return theta


def init_theta(circuit: Circuit, seed: int) -> np.ndarray:
    """Uniform on [0, 2 pi], seeded."""
    return np.random.default_rng(seed).uniform(0.0, 2 * np.pi, size=circuit.num_params)


def z_observables(num_qubits: int, count: int) -> list[PauliString]:
    """Z on each of the first ``count`` qubits."""
    return [PauliString.single(num_qubits, q, "Z") for q in range(count)]


def apply_operation(op: Rotation | Dense, amps: np.ndarray) -> np.ndarray:
    if isinstance(op, Dense):
        return op.unitary @ amps
    half = op.angle / 2
    return np.cos(half) * amps - 1j * np.sin(half) * op.generator.apply(amps)


def evolve(circuit: Circuit, theta, amps: np.ndarray) -> np.ndarray:
    for op in circuit.operations(theta):
        amps = apply_operation(op, amps)
    return amps


def output_states(circuit: Circuit, theta, x) -> np.ndarray:
    """``U(theta) U_in(x)|0>`` for a batch of inputs, as columns."""
    return evolve(circuit, theta, encode_batch(circuit.encoding, x))


def _check_observables(circuit: Circuit, observables: Sequence[PauliString]):
    if not observables:
        raise ValueError("observable set is empty")
    for obs in observables:
        if obs.num_qubits != circuit.num_qubits:
            raise DimensionError(f"observable {obs} does not act on {circuit.num_qubits} qubits")


def forward_batch(circuit: Circuit, theta, x, observables: Sequence[PauliString]) -> np.ndarray:
    """Expectation values, shape ``(batch, len(observables))``."""
    _check_observables(circuit, observables)
    amps = output_states(circuit, theta, x)
    return np.stack([expectation_values(amps, obs) for obs in observables], axis=1)


def forward(circuit: Circuit, theta, x, observables: Sequence[PauliString]) -> np.ndarray:
    """Expectation values ``(<B_1>, ..., <B_m>)`` for a single input ``x``."""
    out = forward_batch(circuit, theta, np.atleast_1d(np.asarray(x, dtype=float))[None, :], observables)
    return out[0]


def insert_shifted(circuit: Circuit, theta, index: int, shift: float) -> np.ndarray:
    """Copy of ``theta`` with ``shift`` added at ``index``.

    Each angle enters through exactly one exp(-i theta P / 2), so shifting it
    is the same as inserting an extra rotation by ``shift`` next to that gate.
    """
    theta = check_theta(circuit, theta)
    if not 0 <= index < theta.size:
        raise IndexError(f"parameter index {index} out of range [0, {theta.size})")
    out = theta.copy()
    out[index] += shift
    return out
