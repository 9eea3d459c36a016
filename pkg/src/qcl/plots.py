"""SVG figures rendered from a run directory's CSV artifacts."""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .experiments import read_csv  # noqa: E402

_RC = {"svg.fonttype": "none", "svg.hashsalt": "qcl", "font.size": 9}


class PlotFormatError(ValueError):
    """Prediction CSV missing, empty, or lacking required columns."""


def _columns(path: Path, required: list[str]) -> dict[str, np.ndarray]:
    if not path.exists():
        raise PlotFormatError(f"{path} not found")
    header, rows = read_csv(path)
    missing = [c for c in required if c not in header]
    if missing:
        raise PlotFormatError(f"{path.name} lacks columns {missing}")
    if not rows:
        raise PlotFormatError(f"{path.name} has no rows")
    cols = {}
    for i, name in enumerate(header):
        vals = [r[i] for r in rows]
        try:
            cols[name] = np.array(vals, dtype=float)
        except ValueError:
            cols[name] = np.array(vals)
    return cols


def _save(fig, path: Path, cfg: dict) -> Path:
    seeds = " ".join(f"{k}={v}" for k, v in sorted(cfg["seeds"].items()))
    fig.savefig(path, format="svg", metadata={"Date": None, "Description": f"seeds: {seeds}"})
    plt.close(fig)
    return path


def _train_sorted(cols):
    order = np.flatnonzero(cols["split"] == "train")
    return order[np.argsort(cols["x"][order])]


def _plot_curves(run_dir, cfg, cols):
    idx = _train_sorted(cols)
    fig, ax = plt.subplots(figsize=(4, 3))
    x = cols["x"][idx]
    ax.plot(x, cols["teacher"][idx], "o", ms=3, color="tab:blue", label="teacher")
    ax.plot(x, cols["initial"][idx], "--", color="tab:gray", label="initial")
    ax.plot(x, cols["final"][idx], "-", color="tab:red", label="final")
    ax.set_xlabel("x")
    ax.set_title(f"{cfg['task']}: {cfg.get('target', '')}")
    ax.legend()
    fig.tight_layout()
    return {"plot": _save(fig, run_dir / f"fit_{cfg.get('target', 'output')}.svg", cfg)}


def _plot_dynamics(run_dir, cfg, cols):
    idx = _train_sorted(cols)
    spins = cfg["observed_spins"]
    fig, axes = plt.subplots(len(spins), 1, figsize=(4, 2.2 * len(spins)), sharex=True, squeeze=False)
    x = cols["x"][idx]
    for ax, s in zip(axes[:, 0], spins):
        ax.plot(x, cols[f"teacher_z{s}"][idx], "o", ms=3, color="tab:blue", label="teacher")
        ax.plot(x, cols[f"initial_z{s}"][idx], "--", color="tab:gray", label="initial")
        ax.plot(x, cols[f"final_z{s}"][idx], "-", color="tab:red", label="final")
        ax.set_ylabel(f"<Z{s}>")
    axes[0, 0].legend()
    axes[-1, 0].set_xlabel("x")
    fig.tight_layout()
    return {"plot": _save(fig, run_dir / "dynamics.svg", cfg)}


def _plot_classify(run_dir, cfg, cols):
    grid = _columns(run_dir / "probability_grid.csv", ["x0", "x1", "p_class0"])
    res = int(round(np.sqrt(grid["x0"].size)))
    fig, axes = plt.subplots(1, 2, figsize=(7, 3.2))
    train = cols["split"] == "train"
    for label, color in ((0, "tab:blue"), (1, "tab:red")):
        sel = train & (cols["label"] == label)
        axes[0].scatter(cols["x0"][sel], cols["x1"][sel], s=6, color=color, label=f"class {label}")
    axes[0].set_title("teacher")
    axes[0].legend()
    p0 = grid["p_class0"].reshape(res, res)
    g0 = grid["x0"].reshape(res, res)
    g1 = grid["x1"].reshape(res, res)
    mesh = axes[1].pcolormesh(g0, g1, 1.0 - p0, shading="auto", cmap="coolwarm", vmin=0, vmax=1)
    axes[1].contour(g0, g1, p0, levels=[0.5], colors="k")
    axes[1].set_title("P(class 1), 0.5 contour")
    fig.colorbar(mesh, ax=axes[1])
    for ax in axes:
        ax.set_aspect("equal")
    fig.tight_layout()
    return {"plot": _save(fig, run_dir / "classify.svg", cfg)}


def _plot_appendix(run_dir, cfg, cols):
    idx = _train_sorted(cols)
    test = np.flatnonzero(cols["split"] == "test")
    test = test[np.argsort(cols["x"][test])]
    fig, axes = plt.subplots(1, 2, figsize=(7, 3), sharey=True)
    for ax, key, title in ((axes[0], "final", "QCL"), (axes[1], "classical", "classical regression")):
        ax.plot(cols["x"][idx], cols["teacher"][idx], "o", color="tab:blue", label="teacher")
        ax.plot(cols["x"][test], cols["clean"][test], ":", color="tab:gray", label="noiseless")
        ax.plot(cols["x"][test], cols[key][test], "-", color="tab:red", label=key)
        ax.set_title(title)
        ax.set_xlabel("x")
        ax.set_ylim(-1.5, 1.5)
        ax.legend()
    fig.tight_layout()
    return {"plot": _save(fig, run_dir / f"overfit_{cfg['target']}.svg", cfg)}


_REQUIRED = {
    "fit1d": ["split", "x", "teacher", "initial", "final"],
    "classify2d": ["split", "x0", "x1", "label", "p0_final"],
    "dynamics": ["split", "x"],
    "overfit_appendix": ["split", "x", "teacher", "clean", "final", "classical"],
}
_PLOTTERS = {
    "fit1d": _plot_curves,
    "classify2d": _plot_classify,
    "dynamics": _plot_dynamics,
    "overfit_appendix": _plot_appendix,
}


def emit_plots(run_dir) -> dict[str, Path]:
    """Render the figure for a finished run; returns ``{"plot": path}``."""
    run_dir = Path(run_dir)
    cfg_path = run_dir / "config.json"
    if not cfg_path.exists():
        raise PlotFormatError(f"{cfg_path} not found")
    cfg = json.loads(cfg_path.read_text(encoding="utf-8"))
    task = cfg["task"]
    required = list(_REQUIRED[task])
    if task == "dynamics":
        required += [f"{k}_z{s}" for s in cfg["observed_spins"] for k in ("teacher", "initial", "final")]
    cols = _columns(run_dir / "predictions.csv", required)
    with plt.rc_context(_RC):
        return _PLOTTERS[task](run_dir, cfg, cols)
