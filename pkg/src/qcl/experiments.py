"""Config-driven experiment runs and their on-disk artifacts.

A run directory contains::

    config.json        resolved configuration (every seed explicit)
    trace.csv          iteration, cost, grad_norm
    predictions.csv    teacher vs. initial and final model outputs
    summary.csv        key,value metrics (also summary.json)
    timing.json        wall-clock data, kept out of the CSVs so they are reproducible
    *.svg              plots, see :mod:`qcl.plots`

plus ``probability_grid.csv`` for ``classify2d`` and ``classical_weights.csv``
for ``overfit_appendix``. Every CSV starts with a ``# seeds: ...`` comment
line followed by a header row.
"""

from __future__ import annotations

import copy
import csv
import datetime as _dt
import io
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import baseline
from .ansatz import Circuit, forward_batch, init_theta, z_observables
from .dynamics import DynamicsTask, generate_teacher
from .encoding import KINDS as ENCODING_KINDS
from .encoding import EncodingSpec
from .hamiltonian import IsingHamiltonian, evolution_gate, sample_coefficients
from .learn import Dataset, NoiseModel, OptimizationAborted, OutputMap, TrainResult, train
from .qstate import ConfigurationError

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
TASKS = ("fit1d", "classify2d", "dynamics", "overfit_appendix")

FIT_TARGETS = {
    "x2": lambda x: x**2,
    "exp": np.exp,
    "sin": np.sin,
    "abs": np.abs,
}
APPENDIX_TARGETS = {
    "sin": lambda x: 0.5 * np.sin(x),
    "x2": lambda x: x**2,
}

SEED_NAMES = ("hamiltonian", "teacher_hamiltonian", "theta", "data", "noise")
_DEFAULT_SEEDS = {"hamiltonian": 0, "teacher_hamiltonian": 1, "theta": 2, "data": 3, "noise": 4}

_COMMON = {
    "schema_version": SCHEMA_VERSION,
    "num_qubits": 6,
    "depth": 6,
    "evolution_time": 10.0,
    "noise": {"enabled": False, "shots": 1000},
    "optimizer": {"maxiter": 200, "gtol": 1e-5},
    "output_dir": "runs",
}
_TASK_DEFAULTS = {
    "fit1d": {"target": "x2", "encoding": "ry_rz", "n_train": 100},
    "classify2d": {"encoding": "multi_dim", "n_train": 200, "n_test": 200, "grid_resolution": 41},
    "dynamics": {
        "encoding": "ry_rz",
        "n_train": 100,
        "teacher_qubits": 10,
        "observed_spins": [1, 2, 3],
        "transient": 300.0,
        "window": 8.0,
    },
    "overfit_appendix": {
        "target": "sin",
        "num_qubits": 3,
        "depth": 3,
        "encoding": "ry_only",
        "n_train": 10,
        "n_test": 100,
        "noise_std": 0.05,
    },
}
_OPTIONAL = {"target", "n_test", "grid_resolution", "teacher_qubits", "observed_spins", "transient", "window", "noise_std"}
_KNOWN = set(_COMMON) | {"task", "seeds", "encoding", "n_train"} | _OPTIONAL


class ConfigError(ConfigurationError):
    """Invalid experiment configuration; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class RunAborted(RuntimeError):
    def __init__(self, message: str, run_dir: Path):
        super().__init__(message)
        self.run_dir = run_dir


# -- configuration ---------------------------------------------------------------


def default_config(task: str, **overrides) -> dict:
    if task not in TASKS:
        raise ConfigError("task", f"unknown task {task!r}; expected one of {TASKS}")
    cfg = copy.deepcopy(_COMMON)
    cfg.update(copy.deepcopy(_TASK_DEFAULTS[task]))
    cfg["task"] = task
    cfg["seeds"] = dict(_DEFAULT_SEEDS)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(cfg.get(key), dict):
            cfg[key] = {**cfg[key], **value}
        else:
            cfg[key] = value
    return resolve_config(cfg)


def resolve_config(raw: dict) -> dict:
    """Fill defaults for the task and validate every field."""
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "config must be a JSON object")
    task = raw.get("task")
    if task not in TASKS:
        raise ConfigError("task", f"unknown task {task!r}; expected one of {TASKS}")
    unknown = set(raw) - _KNOWN
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown field")
    cfg = copy.deepcopy(_COMMON)
    cfg.update(copy.deepcopy(_TASK_DEFAULTS[task]))
    for key, value in raw.items():
        if key in ("seeds", "noise", "optimizer"):
            if not isinstance(value, dict):
                raise ConfigError(key, "must be an object")
            cfg[key] = {**cfg.get(key, {}), **copy.deepcopy(value)}
        else:
            cfg[key] = copy.deepcopy(value)
    cfg["seeds"] = {**_DEFAULT_SEEDS, **cfg.get("seeds", {})}
    _validate(cfg)
    return cfg


def _int(cfg, key, lo, hi=None, sub=None):
    holder = cfg[sub] if sub else cfg
    name = f"{sub}.{key}" if sub else key
    v = holder.get(key)
    if isinstance(v, bool) or not isinstance(v, int) or v < lo or (hi is not None and v > hi):
        raise ConfigError(name, f"expected an integer in [{lo}, {hi if hi is not None else 'inf'}], got {v!r}")


def _num(cfg, key, lo=None, sub=None, positive=False):
    holder = cfg[sub] if sub else cfg
    name = f"{sub}.{key}" if sub else key
    v = holder.get(key)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not np.isfinite(v):
        raise ConfigError(name, f"expected a number, got {v!r}")
    if (lo is not None and v < lo) or (positive and v <= 0):
        raise ConfigError(name, f"out of range: {v!r}")
    holder[key] = float(v)


def _validate(cfg: dict):
    task = cfg["task"]
    if cfg.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"expected {SCHEMA_VERSION}, got {cfg.get('schema_version')!r}")
    _int(cfg, "num_qubits", 1, 12)
    _int(cfg, "depth", 1)
    _num(cfg, "evolution_time")
    if cfg["encoding"] not in ENCODING_KINDS:
        raise ConfigError("encoding", f"expected one of {ENCODING_KINDS}, got {cfg['encoding']!r}")
    _int(cfg, "n_train", 1)
    if "n_test" in cfg:
        _int(cfg, "n_test", 0)
    for name in SEED_NAMES:
        _int(cfg, name, 0, sub="seeds")
    extra = set(cfg["seeds"]) - set(SEED_NAMES)
    if extra:
        raise ConfigError(f"seeds.{sorted(extra)[0]}", "unknown seed")
    if set(cfg["noise"]) - {"enabled", "shots"}:
        raise ConfigError("noise", "allowed keys are 'enabled' and 'shots'")
    if not isinstance(cfg["noise"].get("enabled"), bool):
        raise ConfigError("noise.enabled", "expected true or false")
    _int(cfg, "shots", 1, sub="noise")
    if set(cfg["optimizer"]) - {"maxiter", "gtol"}:
        raise ConfigError("optimizer", "allowed keys are 'maxiter' and 'gtol'")
    _int(cfg, "maxiter", 0, sub="optimizer")
    _num(cfg, "gtol", sub="optimizer", positive=True)
    if not isinstance(cfg["output_dir"], str) or not cfg["output_dir"]:
        raise ConfigError("output_dir", "expected a non-empty path string")

    if task == "fit1d" and cfg.get("target") not in FIT_TARGETS:
        raise ConfigError("target", f"expected one of {sorted(FIT_TARGETS)}, got {cfg.get('target')!r}")
    if task == "overfit_appendix":
        if cfg.get("target") not in APPENDIX_TARGETS:
            raise ConfigError("target", f"expected one of {sorted(APPENDIX_TARGETS)}, got {cfg.get('target')!r}")
        _num(cfg, "noise_std", lo=0.0)
    if task in ("classify2d", "dynamics") and "target" in cfg:
        raise ConfigError("target", f"not used by task {task!r}")
    if task == "classify2d":
        if cfg["encoding"] != "multi_dim":
            raise ConfigError("encoding", "classify2d needs the multi_dim encoding")
        if cfg["num_qubits"] < 2:
            raise ConfigError("num_qubits", "classify2d needs at least 2 qubits")
        for key in ("n_train", "n_test"):
            if cfg[key] % 2:
                raise ConfigError(key, "must be even (equal class sizes)")
        _int(cfg, "grid_resolution", 2)
    elif cfg["encoding"] == "multi_dim":
        raise ConfigError("encoding", f"task {task!r} has 1-D inputs")
    if task == "dynamics":
        _int(cfg, "teacher_qubits", 1, 12)
        _num(cfg, "transient", lo=0.0)
        _num(cfg, "window", positive=True)
        spins = cfg["observed_spins"]
        if (
            not isinstance(spins, list)
            or not spins
            or any(isinstance(s, bool) or not isinstance(s, int) or not 1 <= s <= cfg["teacher_qubits"] for s in spins)
        ):
            raise ConfigError("observed_spins", "expected a list of 1-based spin indices")
        if len(spins) > cfg["num_qubits"]:
            raise ConfigError("observed_spins", "more observed spins than circuit qubits")
        if cfg["seeds"]["teacher_hamiltonian"] == cfg["seeds"]["hamiltonian"]:
            raise ConfigError("seeds.teacher_hamiltonian", "must differ from seeds.hamiltonian")


def load_config(path) -> dict:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON: {exc}") from exc
    return resolve_config(raw)


def dump_config(cfg: dict) -> str:
    return json.dumps(cfg, indent=2, sort_keys=True) + "\n"


# -- CSV helpers ------------------------------------------------------------------------


def seed_line(cfg: dict) -> str:
    return "# seeds: " + " ".join(f"{k}={cfg['seeds'][k]}" for k in SEED_NAMES)


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def write_csv(path: Path, header: list[str], rows, cfg: dict) -> Path:
    buf = io.StringIO()
    buf.write(seed_line(cfg) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8", newline="")
    return path


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    """Header and rows of an artifact CSV, skipping ``#`` comment lines."""
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    rows = list(csv.reader(lines))
    if not rows:
        raise ValueError(f"{path}: no header row")
    return rows[0], rows[1:]


def write_trace(path: Path, records, cfg: dict) -> Path:
    return write_csv(path, ["iteration", "cost", "grad_norm"], ((r.iteration, r.cost, r.grad_norm) for r in records), cfg)


# -- tasks ---------------------------------------------------------------------------


@dataclass
class RunArtifacts:
    run_dir: Path
    config: dict
    summary: dict
    files: dict = field(default_factory=dict)


def build_circuit(cfg: dict, input_dim: int = 1) -> tuple[Circuit, IsingHamiltonian]:
    n = cfg["num_qubits"]
    h = sample_coefficients(n, cfg["seeds"]["hamiltonian"])
    spec = EncodingSpec(cfg["encoding"], n, input_dim)
    return Circuit(n, cfg["depth"], spec, evolution_gate(h, cfg["evolution_time"])), h


def _noise(cfg) -> NoiseModel:
    return NoiseModel(cfg["noise"]["enabled"], cfg["noise"]["shots"], cfg["seeds"]["noise"])


def _train(cfg, circuit, dataset, output_map, cost, observables) -> tuple[TrainResult, np.ndarray]:
    theta0 = init_theta(circuit, cfg["seeds"]["theta"])
    result = train(
        circuit,
        dataset,
        output_map,
        cost,
        observables,
        theta0,
        _noise(cfg),
        gtol=cfg["optimizer"]["gtol"],
        maxiter=cfg["optimizer"]["maxiter"],
        seeds=dict(cfg["seeds"]),
    )
    return result, theta0


def fit1d_dataset(cfg: dict) -> Dataset:
    """Evenly spaced training inputs on [-1, 1]; held-out inputs at the midpoints."""
    fn = FIT_TARGETS[cfg["target"]]
    x = np.linspace(-1.0, 1.0, cfg["n_train"])
    xt = (x[1:] + x[:-1]) / 2
    if "n_test" in cfg:
        xt = np.linspace(-1.0, 1.0, cfg["n_test"] + 2)[1:-1]
    return Dataset.from_splits(x, fn(x), xt, fn(xt))


def circle_data(n_per_class: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Class 0 uniform in the disk r < 0.4, class 1 uniform in the annulus 0.7 < r < 1.

    Returns inputs ``(2n, 2)`` and one-hot teachers ``(2n, 2)``.
    """
    r0 = 0.4 * np.sqrt(rng.uniform(size=n_per_class))
    r1 = np.sqrt(rng.uniform(0.7**2, 1.0, size=n_per_class))
    ang = rng.uniform(0.0, 2 * np.pi, size=(2, n_per_class))
    radii = np.concatenate([r0, r1])
    angles = ang.reshape(-1)
    x = np.clip(np.stack([radii * np.cos(angles), radii * np.sin(angles)], axis=1), -1.0, 1.0)
    teachers = np.repeat(np.eye(2), n_per_class, axis=0)
    return x, teachers


def _run_fit1d(cfg, run_dir, files):
    circuit, _ = build_circuit(cfg)
    ds = fit1d_dataset(cfg)
    obs = z_observables(circuit.num_qubits, 1)
    result, theta0 = _train(cfg, circuit, ds, OutputMap("scaled_identity", 1.0, trainable=True), "quadratic", obs)
    rows = []
    for split, idx in (("train", ds.train_idx), ("test", ds.test_idx)):
        xs = ds.inputs[idx]
        init = forward_batch(circuit, theta0, xs, obs)[:, 0]
        final = result.a * forward_batch(circuit, result.theta, xs, obs)[:, 0]
        rows += [(split, x[0], f[0], i, o) for x, f, i, o in zip(xs, ds.teachers[idx], init, final)]
    rows.sort(key=lambda r: (r[0] != "train", r[1]))
    files["predictions"] = write_csv(run_dir / "predictions.csv", ["split", "x", "teacher", "initial", "final"], rows, cfg)
    summary = {"a": result.a}
    return result, summary


def _run_classify2d(cfg, run_dir, files):
    circuit, _ = build_circuit(cfg, input_dim=2)
    rng = np.random.default_rng(cfg["seeds"]["data"])
    x, f = circle_data(cfg["n_train"] // 2, rng)
    xt, ft = circle_data(cfg["n_test"] // 2, rng)
    ds = Dataset.from_splits(x, f, xt, ft)
    obs = z_observables(circuit.num_qubits, 2)
    omap = OutputMap("softmax", 1.0, trainable=False)
    result, theta0 = _train(cfg, circuit, ds, omap, "cross_entropy", obs)
    rows = []
    for split, idx in (("train", ds.train_idx), ("test", ds.test_idx)):
        xs = ds.inputs[idx]
        p_init = omap(forward_batch(circuit, theta0, xs, obs))[:, 0]
        p_final = omap(forward_batch(circuit, result.theta, xs, obs))[:, 0]
        labels = np.argmax(ds.teachers[idx], axis=1)
        rows += [(split, a, b, lab, pi, pf) for (a, b), lab, pi, pf in zip(xs, labels, p_init, p_final)]
    files["predictions"] = write_csv(
        run_dir / "predictions.csv", ["split", "x0", "x1", "label", "p0_initial", "p0_final"], rows, cfg
    )
    g = np.linspace(-1.0, 1.0, cfg["grid_resolution"])
    gx, gy = np.meshgrid(g, g, indexing="ij")
    grid = np.stack([gx.ravel(), gy.ravel()], axis=1)
    p0 = omap(forward_batch(circuit, result.theta, grid, obs))[:, 0]
    files["probability_grid"] = write_csv(
        run_dir / "probability_grid.csv", ["x0", "x1", "p_class0"], ((a, b, p) for (a, b), p in zip(grid, p0)), cfg
    )
    return result, {"threshold": 0.5}


def _run_dynamics(cfg, run_dir, files):
    circuit, _ = build_circuit(cfg)
    task = DynamicsTask(
        cfg["teacher_qubits"], tuple(s - 1 for s in cfg["observed_spins"]), cfg["transient"], cfg["window"], cfg["n_train"]
    )
    ds, teacher_h = generate_teacher(task, cfg["seeds"]["teacher_hamiltonian"], cfg["seeds"]["hamiltonian"])
    m = len(task.observed_spins)
    obs = z_observables(circuit.num_qubits, m)
    result, theta0 = _train(cfg, circuit, ds, OutputMap("scaled_identity", 1.0, trainable=False), "quadratic", obs)
    rows = []
    for split, idx in (("train", ds.train_idx), ("test", ds.test_idx)):
        xs = ds.inputs[idx]
        init = forward_batch(circuit, theta0, xs, obs)
        final = forward_batch(circuit, result.theta, xs, obs)
        for x, f, i, o in zip(xs, ds.teachers[idx], init, final):
            rows.append((split, x[0], float(task.time_of(x[0])), *f, *i, *o))
    rows.sort(key=lambda r: (r[0] != "train", r[1]))
    spins = cfg["observed_spins"]
    header = ["split", "x", "t"] + [f"teacher_z{s}" for s in spins] + [f"initial_z{s}" for s in spins] + [f"final_z{s}" for s in spins]
    files["predictions"] = write_csv(run_dir / "predictions.csv", header, rows, cfg)
    (run_dir / "teacher_hamiltonian.json").write_text(json.dumps(teacher_h.to_dict(), indent=2) + "\n", encoding="utf-8")
    return result, {}


def _run_appendix(cfg, run_dir, files):
    circuit, _ = build_circuit(cfg)
    fn = APPENDIX_TARGETS[cfg["target"]]
    rng = np.random.default_rng(cfg["seeds"]["data"])
    x, f = baseline.noisy_samples(fn, cfg["n_train"], cfg["noise_std"], rng)
    xt, ft = baseline.noisy_samples(fn, cfg["n_test"], cfg["noise_std"], rng)
    ds = Dataset.from_splits(x, f, xt, ft)
    obs = z_observables(circuit.num_qubits, 1)
    result, theta0 = _train(cfg, circuit, ds, OutputMap("scaled_identity", 1.0, trainable=False), "quadratic", obs)

    model = baseline.least_squares_fit(baseline.APPENDIX_BASIS, x, f)
    classical_train = float(np.mean((model.predict(x) - f) ** 2))
    classical_test = float(np.mean((model.predict(xt) - ft) ** 2))
    rows = []
    for split, idx in (("train", ds.train_idx), ("test", ds.test_idx)):
        xs = ds.inputs[idx]
        init = forward_batch(circuit, theta0, xs, obs)[:, 0]
        final = forward_batch(circuit, result.theta, xs, obs)[:, 0]
        clf = model.predict(xs[:, 0])
        rows += [
            (split, xv[0], fv[0], fn(xv[0]), i, o, c)
            for xv, fv, i, o, c in zip(xs, ds.teachers[idx], init, final, clf)
        ]
    rows.sort(key=lambda r: (r[0] != "train", r[1]))
    files["predictions"] = write_csv(
        run_dir / "predictions.csv", ["split", "x", "teacher", "clean", "initial", "final", "classical"], rows, cfg
    )
    files["classical_weights"] = write_csv(
        run_dir / "classical_weights.csv", ["basis", "weight"], zip(model.basis.names, model.weights), cfg
    )
    summary = {
        "classical_train_mse": classical_train,
        "classical_test_mse": classical_test,
        "classical_weight_norm": baseline.weight_norm(model),
        "classical_rank": model.rank,
        "classical_rank_deficient": model.rank_deficient,
    }
    return result, summary


_RUNNERS = {
    "fit1d": _run_fit1d,
    "classify2d": _run_classify2d,
    "dynamics": _run_dynamics,
    "overfit_appendix": _run_appendix,
}


def run_name(cfg: dict) -> str:
    stamp = _dt.datetime.now().strftime("%Y%m%dT%H%M%S%f")
    target = f"-{cfg['target']}" if "target" in cfg else ""
    return f"{cfg['task']}{target}-{stamp}-s{cfg['seeds']['theta']}"


def run(config: dict, out_dir=None, plots: bool = True) -> RunArtifacts:
    """Execute one experiment end to end and write its artifacts.

    ``out_dir`` overrides ``config["output_dir"]``; the run gets a fresh
    subdirectory named after the task, a timestamp and the theta seed.
    """
    cfg = resolve_config(config)
    if out_dir is not None:
        cfg["output_dir"] = str(out_dir)
    base = Path(cfg["output_dir"])
    base.mkdir(parents=True, exist_ok=True)
    run_dir = base / run_name(cfg)
    while run_dir.exists():
        run_dir = run_dir.with_name(run_dir.name + "_")
    run_dir.mkdir()

    files = {"config": run_dir / "config.json"}
    files["config"].write_text(dump_config(cfg), encoding="utf-8")
    (run_dir / "hamiltonian.json").write_text(
        json.dumps(sample_coefficients(cfg["num_qubits"], cfg["seeds"]["hamiltonian"]).to_dict(), indent=2) + "\n",
        encoding="utf-8",
    )
    t0 = time.perf_counter()
    log.info("running %s in %s", cfg["task"], run_dir)
    try:
        result, summary = _RUNNERS[cfg["task"]](cfg, run_dir, files)
    except OptimizationAborted as exc:
        write_trace(run_dir / "trace.csv", exc.records, cfg)
        (run_dir / "error.json").write_text(json.dumps({"error": "aborted", "message": str(exc)}) + "\n", encoding="utf-8")
        raise RunAborted(str(exc), run_dir) from exc

    files["trace"] = write_trace(run_dir / "trace.csv", result.records, cfg)
    summary = {
        "task": cfg["task"],
        **({"target": cfg["target"]} if "target" in cfg else {}),
        **result.metrics,
        **summary,
        "iterations": result.records[-1].iteration,
        "converged": result.converged,
        "message": result.message,
        "seeds": dict(cfg["seeds"]),
    }
    files["summary"] = write_csv(run_dir / "summary.csv", ["key", "value"], _flatten(summary), cfg)
    (run_dir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    timing = {
        "total_s": time.perf_counter() - t0,
        "iterations": [{"iteration": r.iteration, "elapsed_s": r.elapsed_s} for r in result.records],
    }
    (run_dir / "timing.json").write_text(json.dumps(timing) + "\n", encoding="utf-8")
    artifacts = RunArtifacts(run_dir, cfg, summary, files)
    if plots:
        from .plots import emit_plots

        artifacts.files.update(emit_plots(run_dir))
    return artifacts


def _flatten(summary: dict, prefix: str = ""):
    for key in sorted(summary):
        value = summary[key]
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            yield from _flatten(value, name + ".")
        elif isinstance(value, (list, tuple)):
            for i, v in enumerate(value):
                yield (f"{name}.{i}", v)
        else:
            yield (name, value)
