# %% [markdown]
# # Statevectors, Pauli strings and the input encoding
#
# Qubit 1 is the most significant bit of the amplitude index. A Pauli string
# acts as a bit-flip permutation times a phase, so no matrices are built.

# %%
import numpy as np

from qcl import EncodingSpec, PauliString, apply_pauli_rotation, encode, expectation, pauli_coefficients, zero_state

psi = zero_state(3)
print("<Z1> on |000> =", expectation(psi, PauliString("ZII")))

# %%
# pi rotation about X on qubit 1 flips the top bit
flipped = apply_pauli_rotation(psi, PauliString("XII"), np.pi)
print("nonzero index:", np.flatnonzero(np.abs(flipped.amplitudes) > 0.5))

# %% [markdown]
# ## Encoding x into single-qubit rotations
#
# `ry_only` prepares each qubit as R_Y(arcsin x)|0>, so <X> = x and <Z> = sqrt(1 - x^2).
# The product state carries every product of those, including x^N in <X...X>.

# %%
x = 0.3
for n in (2, 4, 6):
    s = encode(EncodingSpec("ry_only", n), x)
    print(n, expectation(s, PauliString("X" * n)), x**n)

# %%
# ry_rz adds R_Z(arccos x^2) and the Pauli expansion picks up more polynomial terms
coeffs = pauli_coefficients(encode(EncodingSpec("ry_rz", 2), x))
for label, c in sorted(coeffs.items()):
    if abs(c) > 1e-12:
        print(f"{label}: {c:+.4f}")
