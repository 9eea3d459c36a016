# %% [markdown]
# # One-dimensional regression
#
# Six qubits, six layers, output a * <Z1> with a trained alongside theta.
# Every run writes its config, trace, predictions, summary and a figure.

# %%
from qcl.experiments import default_config, run

for target in ("x2", "exp", "sin", "abs"):
    art = run(default_config("fit1d", target=target), out_dir="runs")
    s = art.summary
    print(f"{target:>4}: train MSE {s['train_mse']:.2e}  held-out {s['test_mse']:.2e}  "
          f"a = {s['a']:.3f}  ({s['iterations']} iterations) -> {art.run_dir}")

# %% [markdown]
# |x| has a kink the smooth circuit output cannot reproduce, so its error
# floor is a few orders of magnitude above the smooth targets.
