# %% [markdown]
# Pair energies computed on the fly in b-bit fixed point instead of read
# from a table, on an eight-site ring with two electrons.

# %%
import numpy as np

from fockforge import fock
from fockforge.fixedpoint import fp_inv_sqrt_trace, inv_distance_fp
from fockforge.lattice import LatticeSpec, PotentialField, build_ring_kinetic, coulomb_interaction

spec = LatticeSpec(8)
W = coulomb_interaction(spec, 1.0)
H = fock.SecondQuantHamiltonian.from_parts(build_ring_kinetic(spec, 1.0),
                                           PotentialField.zeros(8), W)

# %% electrons on sites 3 and 6 are three steps apart
xi = 0.5
out = fock.online_diagonal_phase(fock.FockState.basis(8, (3, 6)), spec, np.zeros(8), W, xi, None)
print(out.amplitudes[0b00100100], np.exp(-1j * xi / 3))

# %% the reciprocal distance at a few precisions
for b in (4, 8, 16):
    q = inv_distance_fp(spec, 3, 6, b)
    trace = fp_inv_sqrt_trace(9, b)
    print(b, q.mantissa, q.value, "newton:", trace.result.value, trace.iterations, "iterations")

# %% state error after 20 steps, against exact phases
psi = fock.FockState.basis(8, (1, 2))
ref = fock.evolve_a2(psi, fock.A2Plan(0.05, 20, mode="online"), H, spec)
for b in (4, 8, 12, 16, 24):
    got = fock.evolve_a2(psi, fock.A2Plan(0.05, 20, mode="online", phase_bits=b), H, spec)
    print(b, f"{np.linalg.norm(got.amplitudes - ref.amplitudes):.2e}")
