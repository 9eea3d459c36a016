"""Numerical self-checks of the gradient machinery, used by ``qcl gradcheck``."""

from __future__ import annotations

import time

import numpy as np

from .ansatz import Circuit, init_theta
from .encoding import EncodingSpec
from .grad import finite_diff_grad, param_shift_grad
from .hamiltonian import evolution_gate, sample_coefficients
from .qstate import PauliString


def random_instance(rng: np.random.Generator, num_qubits: int = 4, depth: int = 2):
    """Random circuit, theta, input and single-qubit Z observable."""
    h = sample_coefficients(num_qubits, int(rng.integers(2**31)))
    kind = ("ry_only", "ry_rz")[int(rng.integers(2))]
    circuit = Circuit(num_qubits, depth, EncodingSpec(kind, num_qubits), evolution_gate(h, rng.uniform(0.5, 10.0)))
    theta = init_theta(circuit, int(rng.integers(2**31)))
    x = rng.uniform(-1.0, 1.0)
    obs = PauliString.single(num_qubits, int(rng.integers(num_qubits)), "Z")
    return circuit, theta, x, obs


def shift_vs_finite_difference(n_instances: int = 100, h: float = 1e-4, seed: int = 0) -> dict:
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(n_instances):
        circuit, theta, x, obs = random_instance(rng)
        diff = param_shift_grad(circuit, theta, x, obs) - finite_diff_grad(circuit, theta, x, obs, h)
        worst = max(worst, float(np.max(np.abs(diff))))
    return {"check": "param_shift_vs_finite_difference", "max_abs_diff": worst, "tolerance": 1e-6,
            "passed": worst < 1e-6, "seconds": time.perf_counter() - t0}


def _rotation_matrix(p: np.ndarray, angle: float) -> np.ndarray:
    return np.cos(angle / 2) * np.eye(p.shape[0]) - 1j * np.sin(angle / 2) * p


def commutator_identity(n_instances: int = 100, seed: int = 0) -> dict:
    """``[P, rho] = i (U(pi/2) rho U(pi/2)^dag - U(-pi/2) rho U(-pi/2)^dag)`` on 2 qubits."""
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(n_instances):
        p = PauliString.single(2, int(rng.integers(2)), "XYZ"[int(rng.integers(3))]).to_matrix()
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = a + a.conj().T
        up, um = _rotation_matrix(p, np.pi / 2), _rotation_matrix(p, -np.pi / 2)
        rhs = 1j * (up @ rho @ up.conj().T - um @ rho @ um.conj().T)
        worst = max(worst, float(np.max(np.abs(p @ rho - rho @ p - rhs))))
    return {"check": "commutator_identity", "max_abs_diff": worst, "tolerance": 1e-12,
            "passed": worst < 1e-12, "seconds": time.perf_counter() - t0}
