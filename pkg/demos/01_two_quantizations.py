# %% [markdown]
# Two electrons on a four-site ring, written down twice: as an antisymmetric
# 4x4 tensor and as a vector over 16 occupation bitstrings.

# %%
import numpy as np

from fockforge.bridge import compare_evolutions, first_to_fock, fock_to_first
from fockforge.firstq import slater_state
from fockforge.fock import FockState, occupation_string
from fockforge.lattice import LatticeSpec, PotentialField, build_ring_kinetic, coulomb_interaction

spec = LatticeSpec(4)
T = build_ring_kinetic(spec, 1.0)
V = PotentialField([0.3, -0.2, 0.1, 0.5])
W = coulomb_interaction(spec, 1.0)

# %% electrons on sites 1 and 3 (identity orbitals)
psi = slater_state(np.eye(4), (1, 3), 4, 2)
print(np.round(psi.amplitudes, 3))

# %% the same state as occupation numbers
phi = first_to_fock(psi)
for idx in np.flatnonzero(np.abs(phi.amplitudes) > 1e-12):
    print(occupation_string(idx, 4), np.round(phi.amplitudes[idx], 3))

# %% and back again
back = fock_to_first(FockState.basis(4, (2, 4)))
print("swap deviation", back.swap_deviation())

# %% evolve in both pictures and compare
report = compare_evolutions((1, 2), T, V, W, t=1.0, steps=64)
print(report)
