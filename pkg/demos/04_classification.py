# %% [markdown]
# # Two-class classification
#
# Points inside radius 0.4 form class 0 and points in the annulus 0.7 to 1
# form class 1. <Z1> and <Z2> go through a softmax and the cross entropy is
# minimized. x0 feeds the odd qubits and x1 the even ones.

# %%
import numpy as np

from qcl.experiments import default_config, read_csv, run

art = run(default_config("classify2d"), out_dir="runs")
print("train accuracy:", art.summary["train_accuracy"])
print("held-out accuracy:", art.summary["test_accuracy"])

# %%
_, rows = read_csv(art.run_dir / "probability_grid.csv")
grid = np.array(rows, dtype=float)
centre = grid[np.argmin(np.hypot(grid[:, 0], grid[:, 1])), 2]
corner = grid[np.argmax(np.hypot(grid[:, 0], grid[:, 1])), 2]
print(f"P(class 0) at the centre {centre:.2f}, at a corner {corner:.2f}")
print("figure:", art.files["plot"])
