"""Maps between the first- and second-quantized pictures.

A Fock amplitude ``D_K`` on the ascending tuple ``K`` and the tensor
amplitude ``Psi`` are related by ``D_K = sqrt(N!) * Psi(K)``. The factor
makes both representations unit-norm: for ``N = 2`` the antisymmetric
tensor with ``Psi(1,2) = 1/sqrt(2)``, ``Psi(2,1) = -1/sqrt(2)`` has norm one
and maps to ``D_{(1,2)} = 1``, the single occupation ``11``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from fockforge import firstq, fock, oracle
from fockforge.firstq import FirstQuantState
from fockforge.fock import FockState, SectorBasis
from fockforge.lattice import (
    KineticMatrix,
    MomentumTransform,
    PairInteraction,
    PotentialField,
    momentum_transform,
)

ANTISYMMETRY_GATE = 1e-8


@dataclass(frozen=True)
class CorrespondenceMap:
    """Index bookkeeping between ascending tuples and sector bitstrings."""

    sites: int
    particles: int

    @property
    def normalization(self) -> float:
        return math.sqrt(math.factorial(self.particles))

    @property
    def sector(self) -> SectorBasis:
        return fock.build_sector(self.sites, self.particles)

    def ascending_tuples(self):
        """0-based ascending tuples, in the ascending-bitstring order of the sector."""
        sector = self.sector
        return [tuple(p for p in range(self.sites) if s >> p & 1) for s in sector.bitstrings]


def plucker_overlap(C, J, B) -> complex:
    """``det`` of the rows ``J`` and columns ``B`` of ``C`` (1-based labels).

    Column order is taken as given, so swapping two entries of ``B`` flips
    the sign.
    """
    c = np.asarray(C)
    m_rows, m_cols = c.shape
    if len(J) != len(B):
        raise ValueError("row and column tuples differ in length")
    if any(not 1 <= j <= m_rows for j in J) or any(not 1 <= b <= m_cols for b in B):
        raise IndexError("tuple entry out of range")
    if any(b <= a for a, b in zip(J, J[1:])):
        raise ValueError("row tuple must be strictly ascending")
    if len(J) == 0:
        return 1.0 + 0j
    sub = c[np.ix_([j - 1 for j in J], [b - 1 for b in B])]
    return complex(np.linalg.det(sub))


def first_to_fock(state: FirstQuantState) -> FockState:
    """Sector Fock state with ``D_K = sqrt(N!) * Psi(K)`` on ascending tuples."""
    dev = state.swap_deviation()
    if dev > ANTISYMMETRY_GATE:
        raise ValueError(f"state is not antisymmetric (swap deviation {dev:.2e})")
    cmap = CorrespondenceMap(state.sites, state.particles)
    amps = state.amplitudes
    d = np.array([amps[k] for k in cmap.ascending_tuples()]) * cmap.normalization
    return FockState.from_sector(cmap.sector, d)


def fock_to_first(state: FockState) -> FirstQuantState:
    """Antisymmetric tensor with ``Psi(pi(K)) = sgn(pi) D_K / sqrt(N!)``."""
    numbers = state.particle_numbers()
    if len(numbers) > 1:
        raise ValueError(f"state spans several particle numbers: {numbers.tolist()}")
    n = int(numbers[0]) if len(numbers) else 0
    if n == 0:
        raise ValueError("the vacuum has no first-quantized tensor")
    m = state.modes
    cmap = CorrespondenceMap(m, n)
    d = state.restrict(cmap.sector) / cmap.normalization
    psi = np.zeros((m,) * n, dtype=complex)
    perms = [(p, oracle.permutation_sign(p)) for p in itertools.permutations(range(n))]
    for amp, k in zip(d, cmap.ascending_tuples()):
        if amp == 0:
            continue
        for perm, sign in perms:
            psi[tuple(k[i] for i in perm)] = sign * amp
    return FirstQuantState(n, m, psi, antisymmetric=True)


@dataclass(frozen=True)
class FidelityReport:
    """``|<psi_A1 | psi_A2>|`` after mapping both to the first-quantized picture.

    ``survival`` is ``|<psi(0) | psi_A1(t)>|`` from the oracle route.
    """

    time: float
    steps: int
    oracle_fidelity: float
    trotter_fidelity: float
    a1_trotter_vs_oracle: float
    a2_trotter_vs_oracle: float
    survival: float


def _fidelity(a: np.ndarray, b: np.ndarray) -> float:
    return float(abs(np.vdot(a, b)))


def compare_evolutions(J, T: KineticMatrix, V: PotentialField, W: PairInteraction,
                       t: float, steps: int, N: int | None = None,
                       transform: MomentumTransform | None = None,
                       splitting: str = "strang-2") -> FidelityReport:
    """Evolve one Slater determinant in both quantizations and compare.

    The initial state fills the kinetic eigen-orbitals ``J`` (1-based, in
    the order of ``transform``). It is propagated by the dense first-
    quantized and sector oracles and by the A1 and A2 Trotter plans with
    ``steps`` steps; each A2 result is mapped back with :func:`fock_to_first`.
    """
    M = T.sites
    N = len(J) if N is None else N
    transform = transform or momentum_transform(T)
    psi0 = firstq.slater_state(transform, J, M, N)
    fock0 = first_to_fock(psi0)
    sector = fock.build_sector(M, N)
    H2 = fock.SecondQuantHamiltonian.from_parts(T, V, W)

    h1 = oracle.first_quant_hamiltonian_dense(M, N, T, V, W)
    a1_oracle = oracle.dense_expm(h1, t) @ psi0.vector
    h2 = fock.build_hamiltonian_matrix(H2, sector)
    d_t = oracle.dense_expm(h2, t) @ fock0.restrict(sector)
    a2_oracle = fock_to_first(FockState.from_sector(sector, d_t)).vector

    dt = t / steps
    a1_plan = firstq.A1Plan(dt=dt, steps=steps, splitting=splitting)
    a1_trot = firstq.evolve_a1(psi0, a1_plan, V, W, transform).vector
    a2_plan = fock.A2Plan(dt=dt, steps=steps, splitting=splitting)
    a2_state = fock.evolve_a2(fock0, a2_plan, H2)
    a2_trot = fock_to_first(a2_state).vector

    return FidelityReport(
        time=t,
        steps=steps,
        oracle_fidelity=_fidelity(a1_oracle, a2_oracle),
        trotter_fidelity=_fidelity(a1_trot, a2_trot),
        a1_trotter_vs_oracle=_fidelity(a1_trot, a1_oracle),
        a2_trotter_vs_oracle=_fidelity(a2_trot, a2_oracle),
        survival=_fidelity(psi0.vector, a1_oracle),
    )

