# %% [markdown]
# Error of first-order and symmetric splittings against the dense
# propagator, as the step count doubles from 8 to 128.

# %%
import numpy as np

from fockforge import fock, oracle
from fockforge.lattice import LatticeSpec, PotentialField, build_ring_kinetic, coulomb_interaction

spec = LatticeSpec(4)
H = fock.SecondQuantHamiltonian.from_parts(build_ring_kinetic(spec, 1.0),
                                           PotentialField([0.3, -0.2, 0.1, 0.5]),
                                           coulomb_interaction(spec, 1.0))
sector = fock.build_sector(4, 2)
psi0 = fock.FockState.basis(4, (1, 2))
exact = oracle.dense_expm(fock.build_hamiltonian_matrix(H, sector), 1.0) @ psi0.restrict(sector)

# %%
steps = np.array([8, 16, 32, 64, 128])
for splitting in ("lie-trotter-1", "strang-2"):
    errs = [np.linalg.norm(fock.evolve_a2(psi0, fock.A2Plan(1 / s, s, splitting), H)
                           .restrict(sector) - exact) for s in steps]
    slope = np.polyfit(np.log(1 / steps), np.log(errs), 1)[0]
    print(f"{splitting:14s}", " ".join(f"{e:.2e}" for e in errs), f"slope {slope:.3f}")
