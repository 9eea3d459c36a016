"""End-to-end acceptance checks at their stated tolerances.

Run ``pytest tests/test_acceptance.py -s`` to see the verdict lines as they
happen; they are also repeated in the terminal summary.
"""

import time

import numpy as np
import pytest

from qcl.ansatz import Circuit
from qcl.baseline import pauli_transfer_matrix, pauli_vector, row_norms
from qcl.checks import commutator_identity, shift_vs_finite_difference
from qcl.encoding import EncodingSpec, encode
from qcl.experiments import default_config, read_csv, run
from qcl.hamiltonian import evolution_gate, sample_coefficients
from qcl.learn import NoiseModel, add_sampling_noise
from qcl.qstate import PauliString, expectation, random_unitary


@pytest.fixture(scope="module")
def runs_dir(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance_runs")


_fit1d_cache = {}


def fit1d_run(target, out):
    if target not in _fit1d_cache:
        _fit1d_cache[target] = run(default_config("fit1d", target=target), out_dir=out, plots=False)
    return _fit1d_cache[target]


def test_1_parameter_shift_matches_finite_difference(verdict):
    res = shift_vs_finite_difference(n_instances=100, h=1e-4, seed=0)
    ok = res["max_abs_diff"] < 1e-6 and res["seconds"] < 30
    verdict(1, ok, f"max |shift - fd| = {res['max_abs_diff']:.2e} (< 1e-6), {res['seconds']:.1f} s (< 30 s)")
    assert ok


def test_2_commutator_identity(verdict):
    res = commutator_identity(n_instances=100, seed=0)
    ok = res["max_abs_diff"] < 1e-12 and res["seconds"] < 5
    verdict(2, ok, f"max deviation = {res['max_abs_diff']:.2e} (< 1e-12), {res['seconds']:.2f} s (< 5 s)")
    assert ok


def test_3_encoding_content(verdict):
    rng = np.random.default_rng(3)
    worst_x = worst_z = 0.0
    for n in range(2, 7):
        all_x = PauliString("X" * n)
        for x in rng.uniform(-1, 1, 20):
            state = encode(EncodingSpec("ry_only", n), x)
            worst_x = max(worst_x, abs(expectation(state, all_x) - x**n))
            for q in range(n):
                z = expectation(state, PauliString.single(n, q, "Z"))
                worst_z = max(worst_z, abs(z - np.sqrt(1 - x**2)))
    ok = worst_x < 1e-10 and worst_z < 1e-12
    verdict(3, ok, f"<X...X> error {worst_x:.1e} (< 1e-10), <Z> error {worst_z:.1e} (< 1e-12)")
    assert ok


def test_4_transfer_matrix(verdict):
    rng = np.random.default_rng(4)
    orth = rel = norm = 0.0
    for i in range(50):
        n = 1 + i % 3
        h = sample_coefficients(n, int(rng.integers(2**31)))
        depth = int(rng.integers(1, 4))
        circuit = Circuit(n, depth, EncodingSpec("ry_rz", n), evolution_gate(h, rng.uniform(0.5, 10)))
        u = circuit.unitary(rng.uniform(0, 2 * np.pi, circuit.num_params))
        r = pauli_transfer_matrix(u, n)
        orth = max(orth, np.max(np.abs(r.T @ r - np.eye(4**n))))
        norm = max(norm, np.max(np.abs(row_norms(r) - 1)))
        psi = encode(EncodingSpec("ry_rz", n), rng.uniform(-1, 1)).amplitudes
        rho = np.outer(psi, psi.conj())
        a = pauli_vector(rho, n)
        b = pauli_vector(u @ rho @ u.conj().T, n)
        rel = max(rel, np.max(np.abs(b - r @ a)))
        # a generic unitary too, not only circuit-shaped ones
        g = random_unitary(2**n, rng)
        rg = pauli_transfer_matrix(g, n)
        orth = max(orth, np.max(np.abs(rg.T @ rg - np.eye(4**n))))
    ok = orth < 1e-9 and rel < 1e-9 and norm < 1e-9
    verdict(4, ok, f"|R^T R - I| {orth:.1e}, |b - R a| {rel:.1e}, |row norm - 1| {norm:.1e} (all < 1e-9)")
    assert ok


@pytest.mark.parametrize("target,limit", [("x2", 1e-3), ("exp", 1e-3), ("sin", 1e-3), ("abs", 2e-2)])
def test_5_fit1d(target, limit, runs_dir, verdict):
    t0 = time.perf_counter()
    s = fit1d_run(target, runs_dir).summary
    elapsed = time.perf_counter() - t0
    train, test = s["train_mse"], s["test_mse"]
    ok_train = train < limit
    ok_ratio = test <= 3 * train
    ok = ok_train and ok_ratio and elapsed < 600
    verdict(
        5,
        ok,
        f"fit1d {target}: train MSE {train:.2e} (< {limit:g}), held-out {test:.2e} "
        f"= {test / train:.1f}x train (<= 3x), {elapsed:.0f} s",
    )
    assert ok_train, f"train MSE {train} above {limit}"
    assert ok_ratio, f"held-out MSE {test} exceeds 3x train MSE {train}"


def test_6_classify2d(runs_dir, verdict):
    t0 = time.perf_counter()
    art = run(default_config("classify2d"), out_dir=runs_dir, plots=False)
    elapsed = time.perf_counter() - t0
    s = art.summary
    _, rows = read_csv(art.run_dir / "probability_grid.csv")
    grid = np.array(rows, dtype=float)
    r = np.hypot(grid[:, 0], grid[:, 1])
    inner = grid[r < 0.4, 2]
    outer = grid[(r > 0.7) & (r <= 1.0), 2]
    crosses = grid[:, 2].min() < 0.5 < grid[:, 2].max()
    # boundary lies between the classes: each region sits mostly on its own side
    inner_frac, outer_frac = np.mean(inner > 0.5), np.mean(outer < 0.5)
    separated = inner_frac > 0.5 and outer_frac > 0.5
    ok = s["train_accuracy"] >= 0.95 and s["test_accuracy"] >= 0.90 and crosses and separated and elapsed < 900
    verdict(
        6,
        ok,
        f"train acc {s['train_accuracy']:.3f} (>= 0.95), held-out acc {s['test_accuracy']:.3f} (>= 0.90), "
        f"grid crosses 0.5: {crosses and separated} (inner > 0.5: {inner_frac:.0%}, outer < 0.5: {outer_frac:.0%}), "
        f"{elapsed:.0f} s",
    )
    assert ok


def test_7_dynamics(runs_dir, verdict):
    t0 = time.perf_counter()
    s = run(default_config("dynamics"), out_dir=runs_dir, plots=False).summary
    elapsed = time.perf_counter() - t0
    per = s["train_mse_per_output"]
    ok = len(per) == 3 and max(per) < 1e-2 and elapsed < 1800
    verdict(7, ok, f"per-output train MSE {', '.join(f'{v:.1e}' for v in per)} (< 1e-2), {elapsed:.0f} s")
    assert ok


@pytest.mark.parametrize("target", ["sin", "x2"])
def test_8_overfitting_contrast(target, runs_dir, verdict):
    cfg = default_config("overfit_appendix", target=target)
    s = run(cfg, out_dir=runs_dir, plots=False).summary
    n = cfg["n_train"]
    # residual = sum of squared training errors
    classical_res = s["classical_train_mse"] * n
    qcl_res = s["train_mse"] * n
    checks = {
        "classical residual < 1e-6": classical_res < 1e-6,
        "|w| >= 50": s["classical_weight_norm"] >= 50,
        "QCL residual > 1e-3": qcl_res > 1e-3,
        "QCL held-out < classical": s["test_mse"] < s["classical_test_mse"],
    }
    ok = all(checks.values())
    verdict(
        8,
        ok,
        f"{target}: classical residual {classical_res:.1e}, |w| {s['classical_weight_norm']:.0f} "
        f"(rank {s['classical_rank']}), QCL residual {qcl_res:.1e}, held-out QCL {s['test_mse']:.2e} "
        f"vs classical {s['classical_test_mse']:.2e}; failed: {[k for k, v in checks.items() if not v] or 'none'}",
    )
    assert ok, checks


@pytest.mark.parametrize(
    "task,overrides",
    [("fit1d", {"target": "sin"}), ("overfit_appendix", {"target": "x2"}),
     ("fit1d", {"target": "x2", "noise": {"enabled": True}, "optimizer": {"maxiter": 20}})],
)
def test_9_determinism(task, overrides, tmp_path, verdict):
    cfg = default_config(task, **overrides)
    a = run(cfg, out_dir=tmp_path, plots=False).run_dir
    b = run(cfg, out_dir=tmp_path, plots=False).run_dir
    names = sorted(p.name for p in a.glob("*.csv"))
    same = names == sorted(p.name for p in b.glob("*.csv")) and all(
        (a / nm).read_bytes() == (b / nm).read_bytes() for nm in names
    )
    verdict(9, same, f"{task} {overrides}: {len(names)} CSV files byte-identical: {same}")
    assert same


def test_10_noise_model(verdict):
    rng = np.random.default_rng(10)
    draws = add_sampling_noise(np.zeros(100_000), NoiseModel(enabled=True, shots=800), rng)
    expected = np.sqrt(2 / 800) / 4
    rel = abs(np.std(draws) / expected - 1)
    ok = rel < 0.05
    verdict(10, ok, f"std {np.std(draws):.5f} vs {expected:.5f}, relative error {rel:.2%} (< 5%)")
    assert ok
