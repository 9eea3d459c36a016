"""Brute-force dense references, independent of the package's gate code."""

from functools import reduce

import numpy as np
from scipy.linalg import expm

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}


def kron_all(mats):
    return reduce(np.kron, mats)


def pauli_matrix(label: str) -> np.ndarray:
    return kron_all([PAULI[c] for c in label])


def single(n: int, qubit: int, mat: np.ndarray) -> np.ndarray:
    return kron_all([mat if q == qubit else I2 for q in range(n)])


def rotation(p: np.ndarray, angle: float) -> np.ndarray:
    return expm(-0.5j * angle * p)


def ising_dense(a, J) -> np.ndarray:
    n = len(a)
    h = sum(a[j] * single(n, j, X) for j in range(n))
    for j in range(n):
        for k in range(j):
            h = h + J[j][k] * single(n, j, Z) @ single(n, k, Z)
    return h


def encoding_state(kind: str, n: int, x) -> np.ndarray:
    x = np.atleast_1d(x)
    factors = []
    for q in range(n):
        v = x[q % len(x)]
        u = rotation(Y, np.arcsin(v))
        if kind != "ry_only":
            u = rotation(Z, np.arccos(v**2)) @ u
        factors.append(u @ np.array([1, 0], dtype=complex))
    return kron_all(factors)


def circuit_unitary(n, depth, a, J, time, theta) -> np.ndarray:
    """Layers of exp(-iHT) followed by R_X R_Z R_X on each qubit."""
    u_evo = expm(-1j * time * ising_dense(a, J))
    u = np.eye(2**n, dtype=complex)
    k = 0
    for _ in range(depth):
        u = u_evo @ u
        for q in range(n):
            for axis in (X, Z, X):
                u = rotation(single(n, q, axis), theta[k]) @ u
                k += 1
    return u
