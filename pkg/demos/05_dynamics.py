# %% [markdown]
# # Learning many-body dynamics
#
# A 10-spin transverse Ising system with its own random couplings is evolved
# from |0...0>. After a transient of 300 time units, <Z> of spins 1 to 3
# over the next 8 units becomes the teacher for a 6-qubit circuit.

# %%
import numpy as np

from qcl.dynamics import DynamicsTask, spin_expectations
from qcl.hamiltonian import sample_coefficients

task = DynamicsTask()
teacher = sample_coefficients(10, 1)
x = np.linspace(-1, 1, 5)
print("t(x):", task.time_of(x))
print(spin_expectations(teacher, task.time_of(x), task.observed_spins).round(3))

# %%
from qcl.experiments import default_config, run

art = run(default_config("dynamics"), out_dir="runs")
print("per-spin train MSE:", art.summary["train_mse_per_output"])
print("figure:", art.files["plot"])
