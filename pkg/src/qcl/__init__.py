"""Quantum circuit learning on a dense statevector simulator."""

from .ansatz import Circuit, forward, forward_batch, init_theta, insert_shifted, param_index, z_observables
from .encoding import EncodingSpec, encode, encode_batch, pauli_coefficients
from .grad import finite_diff_grad, param_shift_grad, shift_jacobian
from .hamiltonian import IsingHamiltonian, evolution_gate, sample_coefficients, to_dense
from .learn import Dataset, NoiseModel, OutputMap, add_sampling_noise, minimize, train
from .qstate import (
    PauliString,
    StateVector,
    apply_dense_unitary,
    apply_pauli_rotation,
    expectation,
    zero_state,
)

__version__ = "0.1.0"
