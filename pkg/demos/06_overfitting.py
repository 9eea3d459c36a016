# %% [markdown]
# # Unitarity versus free linear weights
#
# The 3-qubit circuit with ry_only encoding can only combine nine functions
# of x. A classical least-squares fit over the same nine functions is free
# to choose huge weights; the circuit's transfer matrix is orthogonal, so
# its effective weights stay bounded.

# %%
import numpy as np

from qcl import Circuit, EncodingSpec, evolution_gate, init_theta, sample_coefficients
from qcl.baseline import pauli_transfer_matrix, row_norms

circuit = Circuit(3, 3, EncodingSpec("ry_only", 3), evolution_gate(sample_coefficients(3, 0), 10.0))
r = pauli_transfer_matrix(circuit.unitary(init_theta(circuit, 2)), 3)
print("max |R^T R - I|:", np.max(np.abs(r.T @ r - np.eye(64))))
print("row norms in [%.12f, %.12f]" % (row_norms(r).min(), row_norms(r).max()))

# %%
from qcl.experiments import default_config, run

for target in ("sin", "x2"):
    s = run(default_config("overfit_appendix", target=target), out_dir="runs").summary
    print(f"{target}: classical |w| = {s['classical_weight_norm']:.1f} (rank {s['classical_rank']}), "
          f"held-out MSE classical {s['classical_test_mse']:.3f} vs circuit {s['test_mse']:.4f}")

# %% [markdown]
# Only seven of the nine functions are linearly independent, so ten noisy
# points cannot be matched exactly. The weights still blow up, and the
# classical fit swings wildly between the training points.
