"""Cost functions, output maps and their gradients through the circuit.

The chain rule runs over ``jac[i, k, j] = d<B_k>(x_i)/d theta_j`` as returned
by :func:`qcl.grad.shift_jacobian`.
"""

from __future__ import annotations

import logging

import numpy as np

log = logging.getLogger(__name__)

PROB_FLOOR = 1e-12


def _pair(outputs, teachers) -> tuple[np.ndarray, np.ndarray]:
    y = np.atleast_2d(np.asarray(outputs, dtype=float))
    f = np.atleast_2d(np.asarray(teachers, dtype=float))
    if y.shape != f.shape:
        raise ValueError(f"outputs {y.shape} and teachers {f.shape} differ in shape")
    return y, f


def quadratic_cost(outputs, teachers) -> float:
    """Sum over samples of the squared Euclidean distance."""
    y, f = _pair(outputs, teachers)
    return float(np.sum((y - f) ** 2))


def softmax(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    e = np.exp(q - np.max(q, axis=-1, keepdims=True))
    return e / np.sum(e, axis=-1, keepdims=True)


def cross_entropy(outputs, teachers) -> float:
    """``-sum_i sum_k f_ik log y_ik`` for probability rows ``y`` and one-hot ``f``."""
    y, f = _pair(outputs, teachers)
    if np.any(y[f > 0] < PROB_FLOOR):
        log.warning("probability below %g at a true class; clamping", PROB_FLOOR)
    return float(-np.sum(f * np.log(np.maximum(y, PROB_FLOOR))))


def quadratic_cost_gradient(values, jac, teachers, a: float = 1.0):
    """Cost, d/d theta and d/d a of ``sum_i ||a <B>(x_i) - f_i||^2``."""
    q, f = _pair(values, teachers)
    resid = a * q - f
    cost = float(np.sum(resid**2))
    g_theta = 2.0 * a * np.einsum("ik,ikj->j", resid, jac)
    g_a = 2.0 * float(np.sum(resid * q))
    return cost, g_theta, g_a


def cross_entropy_gradient(values, jac, teachers, a: float = 1.0):
    """Same for cross-entropy on ``softmax(a <B>)``; d cost/d q_k = y_k - f_k."""
    q, f = _pair(values, teachers)
    y = softmax(a * q)
    cost = cross_entropy(y, f)
    dq = y - f
    g_theta = a * np.einsum("ik,ikj->j", dq, jac)
    g_a = float(np.sum(dq * q))
    return cost, g_theta, g_a
