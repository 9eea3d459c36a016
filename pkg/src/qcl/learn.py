"""Datasets, sampling noise, the BFGS optimizer and the training loop."""

from __future__ import annotations

import logging
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import line_search

from .ansatz import Circuit, check_theta, forward_batch
from .costs import (
    cross_entropy,
    cross_entropy_gradient,
    quadratic_cost_gradient,
    softmax,
)
from .grad import shift_jacobian
from .qstate import PauliString

log = logging.getLogger(__name__)

COST_KINDS = ("quadratic", "cross_entropy")


# -- data ---------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Dataset:
    inputs: np.ndarray  # (n, input_dim)
    teachers: np.ndarray  # (n, output_dim)
    train_idx: np.ndarray
    test_idx: np.ndarray

    def __post_init__(self):
        inputs = np.asarray(self.inputs, dtype=float)
        if inputs.ndim == 1:
            inputs = inputs[:, None]
        teachers = np.asarray(self.teachers, dtype=float)
        if teachers.ndim == 1:
            teachers = teachers[:, None]
        if inputs.shape[0] != teachers.shape[0]:
            raise ValueError("need exactly one teacher per input")
        train_idx = np.asarray(self.train_idx, dtype=int)
        test_idx = np.asarray(self.test_idx, dtype=int)
        if np.intersect1d(train_idx, test_idx).size:
            raise ValueError("train and test index sets overlap")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "teachers", teachers)
        object.__setattr__(self, "train_idx", train_idx)
        object.__setattr__(self, "test_idx", test_idx)

    @classmethod
    def from_splits(cls, train_x, train_f, test_x=None, test_f=None) -> "Dataset":
        train_x = np.asarray(train_x, dtype=float)
        train_f = np.asarray(train_f, dtype=float)
        n_train = train_x.shape[0]
        if test_x is None:
            return cls(train_x, train_f, np.arange(n_train), np.arange(0))
        inputs = np.concatenate([_col(train_x), _col(test_x)])
        teachers = np.concatenate([_col(train_f), _col(test_f)])
        return cls(inputs, teachers, np.arange(n_train), np.arange(n_train, inputs.shape[0]))

    def train(self) -> tuple[np.ndarray, np.ndarray]:
        return self.inputs[self.train_idx], self.teachers[self.train_idx]

    def test(self) -> tuple[np.ndarray, np.ndarray]:
        return self.inputs[self.test_idx], self.teachers[self.test_idx]


def _col(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return a[:, None] if a.ndim == 1 else a


@dataclass(frozen=True)
class OutputMap:
    """``scaled_identity``: y = a <B>; ``softmax``: y = softmax(a <B>)."""

    kind: str = "scaled_identity"
    scale_a: float = 1.0
    trainable: bool = False

    def __post_init__(self):
        if self.kind not in ("scaled_identity", "softmax"):
            raise ValueError(f"unknown output map {self.kind!r}")

    def __call__(self, values, a: float | None = None) -> np.ndarray:
        a = self.scale_a if a is None else a
        q = a * np.asarray(values, dtype=float)
        return softmax(q) if self.kind == "softmax" else q


# -- sampling noise -------------------------------------------------------------


@dataclass(frozen=True)
class NoiseModel:
    enabled: bool = False
    shots: int = 1000
    rng_seed: int = 0

    def __post_init__(self):
        if self.enabled and self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")


def sampling_sigma(z, shots: int) -> np.ndarray:
    """Standard deviation ``sqrt(2/N_s) (1 - z^2) / 4`` used to emulate sampling."""
    z = np.asarray(z, dtype=float)
    return np.sqrt(2.0 / shots) * (1.0 - z**2) / 4.0


def add_sampling_noise(z, model: NoiseModel, rng: np.random.Generator | None = None):
    """Add Gaussian noise to expectation value(s) ``z`` and clip to [-1, 1]."""
    if not model.enabled:
        return z
    if model.shots < 1:
        raise ValueError(f"shots must be >= 1, got {model.shots}")
    arr = np.asarray(z, dtype=float)
    if np.any(np.abs(arr) > 1.0 + 1e-12):
        raise ValueError("expectation values must lie in [-1, 1]")
    rng = np.random.default_rng(model.rng_seed) if rng is None else rng
    noisy = np.clip(arr + rng.normal(size=arr.shape) * sampling_sigma(arr, model.shots), -1.0, 1.0)
    return float(noisy) if np.ndim(z) == 0 else noisy


# -- optimizer ----------------------------------------------------------------------


@dataclass
class TrainRecord:
    iteration: int
    cost: float
    grad_norm: float  # max-abs component
    elapsed_s: float
    params: np.ndarray = field(repr=False)
    seeds: dict = field(default_factory=dict)


@dataclass
class MinimizeResult:
    x: np.ndarray
    fun: float
    records: list[TrainRecord]
    converged: bool
    message: str
    nfev: int


class OptimizationAborted(RuntimeError):
    def __init__(self, message: str, records: list[TrainRecord]):
        super().__init__(message)
        self.records = records


class GradientCheckError(ValueError):
    pass


class _Memo:
    """Caches the last (value, gradient) so the line search doesn't recompute."""

    def __init__(self, fun):
        self.fun = fun
        self.x = None
        self.nfev = 0

    def __call__(self, x):
        if self.x is None or not np.array_equal(x, self.x):
            f, g = self.fun(np.array(x, dtype=float))
            self.nfev += 1
            self.x = np.array(x, dtype=float)
            self.f, self.g = float(f), np.asarray(g, dtype=float)
        return self.f, self.g

    def value(self, x):
        return self(x)[0]

    def grad(self, x):
        return self(x)[1]


def check_gradient(fun, x0, g0, n_dirs: int = 3, h: float = 1e-6, tol: float = 1e-5, seed: int = 0):
    """Compare directional derivatives of ``fun`` with ``g0`` along random directions."""
    rng = np.random.default_rng(seed)
    for _ in range(n_dirs):
        d = rng.normal(size=x0.size)
        d /= np.linalg.norm(d)
        fd = (fun(x0 + h * d)[0] - fun(x0 - h * d)[0]) / (2 * h)
        an = float(g0 @ d)
        if abs(fd - an) > tol * max(1.0, abs(an)):
            raise GradientCheckError(
                f"gradient check failed: directional derivative {an:.8g} vs finite difference {fd:.8g}"
            )


def minimize(
    objective: Callable[[np.ndarray], tuple[float, np.ndarray]],
    x0,
    *,
    gtol: float = 1e-5,
    maxiter: int = 200,
    check_grad: bool = True,
    seeds: dict | None = None,
    callback: Callable[[TrainRecord], None] | None = None,
) -> MinimizeResult:
    """BFGS with a strong-Wolfe line search.

    ``objective`` returns ``(value, gradient)``. Stops when the largest
    gradient component drops below ``gtol`` or after ``maxiter`` iterations.
    If the line search fails, a steepest-descent step with step halving is
    taken and the inverse-Hessian estimate is reset.
    """
    seeds = dict(seeds or {})
    memo = _Memo(objective)
    x = np.array(x0, dtype=float)
    t0 = time.perf_counter()
    records: list[TrainRecord] = []

    def record(k, f, g, xk):
        rec = TrainRecord(k, f, float(np.max(np.abs(g))), time.perf_counter() - t0, xk.copy(), seeds)
        records.append(rec)
        if callback is not None:
            callback(rec)

    f, g = memo(x)
    if not (np.isfinite(f) and np.all(np.isfinite(g))):
        raise OptimizationAborted("non-finite objective at the starting point", records)
    if check_grad:
        check_gradient(objective, x, g)
    record(0, f, g, x)

    n = x.size
    hinv = np.eye(n)
    f_prev = None
    converged = False
    message = "maximum number of iterations reached"
    for k in range(1, maxiter + 1):
        if np.max(np.abs(g)) < gtol:
            converged, message = True, "gradient below tolerance"
            break
        p = -hinv @ g
        if g @ p >= 0:  # lost positive definiteness
            hinv = np.eye(n)
            p = -g
        with warnings.catch_warnings():
            warnings.filterwarnings("ignore", "The line search algorithm")  # failure handled below
            alpha, *_ = line_search(memo.value, memo.grad, x, p, gfk=g, old_fval=f, old_old_fval=f_prev, maxiter=20)
        if alpha is None:
            log.info("line search failed at iteration %d; taking a steepest-descent step", k)
            p = -g
            alpha = 1.0 / max(1.0, np.linalg.norm(g))
            for _ in range(60):
                if memo.value(x + alpha * p) < f:
                    break
                alpha /= 2
            else:
                message = "no descent step found"
                break
            hinv = np.eye(n)
        x_new = x + alpha * p
        f_new, g_new = memo(x_new)
        if not (np.isfinite(f_new) and np.all(np.isfinite(g_new))):
            raise OptimizationAborted(f"non-finite objective at iteration {k}", records)
        s, y = x_new - x, g_new - g
        sy = s @ y
        if sy > 1e-12:
            if k == 1 and np.allclose(hinv, np.eye(n)):
                hinv = np.eye(n) * (sy / (y @ y))
            rho = 1.0 / sy
            hy = hinv @ y
            hinv = hinv + ((sy + y @ hy) * rho * rho) * np.outer(s, s) - rho * (np.outer(hy, s) + np.outer(s, hy))
        f_prev, f, g, x = f, f_new, g_new, x_new
        record(k, f, g, x)
    else:
        if np.max(np.abs(g)) < gtol:
            converged, message = True, "gradient below tolerance"

    return MinimizeResult(x, f, records, converged, message, memo.nfev)


# -- training -----------------------------------------------------------------------------


@dataclass
class TrainResult:
    theta: np.ndarray
    a: float
    records: list[TrainRecord]
    metrics: dict
    converged: bool
    message: str


def predict(circuit: Circuit, theta, a: float, x, observables: Sequence[PauliString], output_map: OutputMap):
    return output_map(forward_batch(circuit, theta, x, observables), a)


def evaluate(outputs: np.ndarray, teachers: np.ndarray, cost: str) -> dict:
    """Mean metrics over samples: MSE (overall and per output) or accuracy."""
    if len(teachers) == 0:
        return {}
    if cost == "cross_entropy":
        return {
            "accuracy": float(np.mean(np.argmax(outputs, 1) == np.argmax(teachers, 1))),
            "cross_entropy": cross_entropy(outputs, teachers) / len(teachers),
        }
    per_output = np.mean((outputs - teachers) ** 2, axis=0)
    return {"mse": float(np.mean(np.sum((outputs - teachers) ** 2, axis=1))), "mse_per_output": per_output.tolist()}


def make_objective(
    circuit: Circuit,
    x,
    teachers,
    observables: Sequence[PauliString],
    output_map: OutputMap,
    cost: str,
    noise: NoiseModel | None = None,
):
    """Objective over ``z = theta`` (or ``[theta, a]`` if a is trainable)."""
    if cost not in COST_KINDS:
        raise ValueError(f"unknown cost {cost!r}")
    if (cost == "cross_entropy") != (output_map.kind == "softmax"):
        raise ValueError("cross_entropy goes with the softmax output map, quadratic with scaled_identity")
    teachers = np.asarray(teachers, dtype=float)
    if teachers.ndim == 1:
        teachers = teachers[:, None]
    if teachers.shape[1] != len(observables):
        raise ValueError(f"{len(observables)} observables for {teachers.shape[1]}-dimensional teachers")
    grad_fn = cross_entropy_gradient if cost == "cross_entropy" else quadratic_cost_gradient
    npar = circuit.num_params
    noisy = None
    if noise is not None and noise.enabled:
        rng = np.random.default_rng(noise.rng_seed)

        def noisy(v):
            return add_sampling_noise(v, noise, rng)

    def objective(z):
        theta = z[:npar]
        a = z[npar] if output_map.trainable else output_map.scale_a
        values, jac = shift_jacobian(circuit, theta, x, observables, noise=noisy)
        c, g_theta, g_a = grad_fn(values, jac, teachers, a)
        return c, (np.append(g_theta, g_a) if output_map.trainable else g_theta)

    return objective


def train(
    circuit: Circuit,
    dataset: Dataset,
    output_map: OutputMap,
    cost: str,
    observables: Sequence[PauliString],
    theta0,
    noise: NoiseModel | None = None,
    *,
    gtol: float = 1e-5,
    maxiter: int = 200,
    seeds: dict | None = None,
    check_grad: bool = True,
) -> TrainResult:
    """Fit theta (and a, if trainable) on the training split; evaluate both splits."""
    theta0 = check_theta(circuit, theta0)
    train_x, train_f = dataset.train()
    objective = make_objective(circuit, train_x, train_f, observables, output_map, cost, noise)
    z0 = np.append(theta0, output_map.scale_a) if output_map.trainable else theta0.copy()
    noisy = noise is not None and noise.enabled
    res = minimize(objective, z0, gtol=gtol, maxiter=maxiter, check_grad=check_grad and not noisy, seeds=seeds)
    theta = res.x[: circuit.num_params]
    a = float(res.x[-1]) if output_map.trainable else output_map.scale_a

    metrics = {}
    for split, (xs, fs) in (("train", (train_x, train_f)), ("test", dataset.test())):
        if len(xs):
            out = predict(circuit, theta, a, xs, observables, output_map)
            metrics.update({f"{split}_{k}": v for k, v in evaluate(out, fs, cost).items()})
    metrics["final_cost"] = res.fun
    return TrainResult(theta, a, res.records, metrics, res.converged, res.message)
