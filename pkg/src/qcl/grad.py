"""Parameter-shift gradients of expectation values.

For a gate exp(-i theta_j P_j / 2) the derivative of any expectation value is

    d<B>/d theta_j = (<B>(theta_j + pi/2) - <B>(theta_j - pi/2)) / 2

which is exact, not an approximation. ``param_shift_grad`` evaluates it by
calling the forward pass twice per parameter. ``shift_jacobian`` produces the
same shifted expectation values for a whole dataset and all observables at
once by caching the state before each gate and carrying every observable
backwards through the remaining gates.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .ansatz import Circuit, Dense, Rotation, apply_operation, check_theta, forward, insert_shifted
from .encoding import encode_batch
from .qstate import PauliString

SHIFT = np.pi / 2


def param_shift_grad(circuit: Circuit, theta, x, observable: PauliString) -> np.ndarray:
    theta = check_theta(circuit, theta)
    grad = np.empty(theta.size)
    for j in range(theta.size):
        plus = forward(circuit, insert_shifted(circuit, theta, j, SHIFT), x, [observable])[0]
        minus = forward(circuit, insert_shifted(circuit, theta, j, -SHIFT), x, [observable])[0]
        grad[j] = (plus - minus) / 2
    return grad


def finite_diff_grad(circuit: Circuit, theta, x, observable: PauliString, h: float = 1e-4) -> np.ndarray:
    """Central differences, used only to check the parameter-shift rule."""
    if not h > 0:
        raise ValueError(f"step h must be positive, got {h}")
    theta = check_theta(circuit, theta)
    grad = np.empty(theta.size)
    for j in range(theta.size):
        up = forward(circuit, insert_shifted(circuit, theta, j, h), x, [observable])[0]
        down = forward(circuit, insert_shifted(circuit, theta, j, -h), x, [observable])[0]
        grad[j] = (up - down) / (2 * h)
    return grad


def _conjugate(op: Rotation | Dense, obs: np.ndarray) -> np.ndarray:
    """``G^dag O G`` for a stack of Hermitian matrices ``obs`` (m, d, d)."""
    if isinstance(op, Dense):
        u = op.unitary
        return u.conj().T @ obs @ u
    c, s = np.cos(op.angle / 2), np.sin(op.angle / 2)
    out = np.empty_like(obs)
    for i, o in enumerate(obs):
        po = op.generator.apply(o)
        op_ = po.conj().T  # O P, since O and P are Hermitian
        out[i] = c * c * o + 1j * c * s * (po - op_) + s * s * op.generator.apply(op_)
    return out


def shift_jacobian(
    circuit: Circuit,
    theta,
    x,
    observables: Sequence[PauliString],
    noise: Callable[[np.ndarray], np.ndarray] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Outputs and their parameter-shift Jacobian over a batch of inputs.

    Returns ``(values, jac)`` with ``values[i, k] = <B_k>(x_i)`` and
    ``jac[i, k, j] = (<B_k>_j^+ - <B_k>_j^-) / 2``. If ``noise`` is given it
    is applied to ``values`` and to every shifted expectation, as a
    measurement would be.
    """
    ops = circuit.operations(theta)
    amps = encode_batch(circuit.encoding, x)
    before: dict[int, np.ndarray] = {}
    for op in ops:
        if isinstance(op, Rotation):
            before[op.index] = amps
        amps = apply_operation(op, amps)

    values = np.stack([np.real(np.sum(amps.conj() * b.apply(amps), axis=0)) for b in observables], axis=1)
    if noise is not None:
        values = noise(values)

    batch, m = amps.shape[1], len(observables)
    jac = np.empty((batch, m, circuit.num_params))
    heis = np.stack([b.to_matrix() for b in observables])
    for op in reversed(ops):
        if isinstance(op, Rotation):
            psi = before[op.index]
            shifted = []
            for sign in (1.0, -1.0):
                half = (op.angle + sign * SHIFT) / 2
                phi = np.cos(half) * psi - 1j * np.sin(half) * op.generator.apply(psi)
                e = np.real(np.einsum("di,mdi->im", phi.conj(), heis @ phi))
                shifted.append(noise(e) if noise is not None else e)
            jac[:, :, op.index] = (shifted[0] - shifted[1]) / 2
        heis = _conjugate(op, heis)
    return values, jac
