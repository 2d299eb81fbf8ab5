"""First-quantized simulation (A1).

The state is an ``N``-leg tensor of shape ``(M,) * N``: ``psi[x1, ..., xN]``
with 0-based array indices and particle 1 on the slowest (first) axis, so
``psi.reshape(-1)`` is the row-major vector over position tuples. Orbital
and site labels passed to the public functions are 1-based.

Potential and pair energies are diagonal in this basis and applied as
phases; the kinetic energy is applied leg by leg in its eigenbasis.
Degenerate tuples (two particles on one site) are stored explicitly and
simply carry zero amplitude in antisymmetric states.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from fockforge.fixedpoint import inv_distance_fp
from fockforge.lattice import MomentumTransform, PairInteraction, PotentialField

Splitting = Literal["lie-trotter-1", "strang-2"]
SPLITTINGS = ("lie-trotter-1", "strang-2")


class DegenerateStateError(ValueError):
    """Input has no component in the antisymmetric subspace."""


@dataclass(frozen=True, eq=False)
class FirstQuantState:
    particles: int
    sites: int
    amplitudes: np.ndarray
    antisymmetric: bool = False

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        shape = (self.sites,) * self.particles
        if a.size != self.sites**self.particles:
            raise ValueError(f"expected {self.sites}**{self.particles} amplitudes, got {a.size}")
        object.__setattr__(self, "amplitudes", a.reshape(shape))

    @property
    def vector(self) -> np.ndarray:
        return self.amplitudes.reshape(-1)

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    def with_amplitudes(self, amplitudes: np.ndarray) -> FirstQuantState:
        return replace(self, amplitudes=amplitudes)

    def swap_deviation(self) -> float:
        """Largest ``|psi(..i..j..) + psi(..j..i..)|`` over all leg pairs."""
        a = self.amplitudes
        worst = 0.0
        for i in range(self.particles):
            for j in range(i + 1, self.particles):
                worst = max(worst, float(np.max(np.abs(a + np.swapaxes(a, i, j)))))
        return worst

    def occupations(self) -> np.ndarray:
        """Expected site occupations ``<n_p>``, summed over particles."""
        prob = np.abs(self.amplitudes) ** 2
        occ = np.zeros(self.sites)
        for i in range(self.particles):
            axes = tuple(k for k in range(self.particles) if k != i)
            occ += prob.sum(axis=axes) if axes else prob
        return occ


@dataclass(frozen=True)
class A1Plan:
    dt: float
    steps: int = 1
    splitting: Splitting = "strang-2"
    phase_bits: int | None = None

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be at least 1")
        if self.splitting not in SPLITTINGS:
            raise ValueError(f"unknown splitting {self.splitting!r}")
        if self.phase_bits is not None and self.phase_bits < 1:
            raise ValueError("phase_bits must be positive")


def _orbital_rows(C) -> np.ndarray:
    # a MomentumTransform keeps eigen-orbitals in its columns
    if isinstance(C, MomentumTransform):
        return C.matrix.T
    return np.asarray(C)


def slater_state(C, J, M: int, N: int) -> FirstQuantState:
    """Slater determinant of orbitals ``J`` (1-based, strictly ascending).

    The amplitude at tuple ``B`` is ``det(C[J, B]) / sqrt(N!)``, with
    orbital ``j`` read from row ``j`` of ``C``. A :class:`MomentumTransform`
    is accepted too, in which case its columns (the kinetic eigenvectors)
    are the orbitals.
    """
    rows = _orbital_rows(C)
    J = tuple(int(j) for j in J)
    if len(J) != N:
        raise ValueError(f"need {N} orbitals, got {len(J)}")
    if any(b <= a for a, b in zip(J, J[1:])):
        raise ValueError(f"orbital labels must be strictly ascending, got {J}")
    if J and not (1 <= J[0] and J[-1] <= rows.shape[0]):
        raise ValueError("orbital label out of range")
    if rows.shape[1] != M:
        raise ValueError("orbital matrix does not match the number of sites")
    sub = rows[[j - 1 for j in J], :]                       # (N, M)
    tuples = np.array(list(itertools.product(range(M), repeat=N)), dtype=int)
    mats = sub[:, tuples].transpose(1, 0, 2)                 # (M**N, N, N)
    amps = np.linalg.det(mats) / math.sqrt(math.factorial(N))
    return FirstQuantState(N, M, amps, antisymmetric=True)


def antisymmetrize(raw, N: int, M: int) -> FirstQuantState:
    """Normalized projection of ``raw`` onto the antisymmetric subspace."""
    a = np.asarray(raw, dtype=complex).reshape((M,) * N)
    out = np.zeros_like(a)
    for perm in itertools.permutations(range(N)):
        inversions = sum(perm[i] > perm[j] for i in range(N) for j in range(i + 1, N))
        sign = -1 if inversions % 2 else 1
        out += sign * np.transpose(a, perm)
    out /= math.factorial(N)
    norm = np.linalg.norm(out)
    if norm < 1e-14:
        raise DegenerateStateError("input has no antisymmetric component")
    return FirstQuantState(N, M, out / norm, antisymmetric=True)


def localized_state(sites, M: int) -> FirstQuantState:
    """Antisymmetrized product of particles on the given 1-based sites."""
    raw = np.zeros((M,) * len(sites), dtype=complex)
    raw[tuple(s - 1 for s in sites)] = 1.0
    return antisymmetrize(raw, len(sites), M)


def pair_energy_table(W: PairInteraction, phase_bits: int | None = None) -> np.ndarray:
    """``W[p, q]``, or its fixed-point reconstruction when ``phase_bits`` is set.

    The fixed-point table is ``strength * fp(1/d(p, q))`` and only exists
    for distance-based interactions.
    """
    if phase_bits is None:
        return np.asarray(W.values, dtype=float)
    if not W.is_distance_based:
        raise ValueError("fixed-point phases need a distance-based interaction")
    m = W.sites
    w = np.zeros((m, m))
    for p in range(1, m + 1):
        for q in range(p + 1, m + 1):
            r = inv_distance_fp(W.lattice, p, q, phase_bits).value
            w[p - 1, q - 1] = w[q - 1, p - 1] = W.strength * r
    return w


def diagonal_energies(N: int, M: int, V: PotentialField, W: PairInteraction,
                      phase_bits: int | None = None) -> np.ndarray:
    """Energy ``sum_i V(x_i) + sum_{i<j} W(x_i, x_j)`` on every tuple, shape ``(M,)*N``."""
    v = np.asarray(V.values, dtype=float)
    w = pair_energy_table(W, phase_bits)
    e = np.zeros((M,) * N)
    for i in range(N):
        shape = [1] * N
        shape[i] = M
        e = e + v.reshape(shape)
        for j in range(i + 1, N):
            shape2 = [1] * N
            shape2[i] = shape2[j] = M
            e = e + w.reshape(shape2)
    return e


def apply_diagonal_phase(state: FirstQuantState, V: PotentialField, W: PairInteraction,
                         dt: float, phase_bits: int | None = None,
                         energies: np.ndarray | None = None) -> FirstQuantState:
    """Multiply each tuple amplitude by ``exp(-i dt E(x))``.

    ``energies`` may be passed in to skip recomputing the tuple energies.
    """
    if V.sites != state.sites or W.sites != state.sites:
        raise ValueError("potential/interaction size does not match the state")
    if energies is None:
        energies = diagonal_energies(state.particles, state.sites, V, W, phase_bits)
    return state.with_amplitudes(state.amplitudes * np.exp(-1j * dt * energies))


def _apply_to_leg(u: np.ndarray, a: np.ndarray, leg: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(u, a, axes=([1], [leg])), 0, leg)


def apply_kinetic_step(state: FirstQuantState, transform: MomentumTransform,
                       dt: float) -> FirstQuantState:
    """``exp(-i dt sum_i T^(i))``: per leg, rotate to momentum, phase, rotate back."""
    if transform.sites != state.sites:
        raise ValueError("transform size does not match the state")
    c = transform.matrix
    c_dag = c.conj().T
    phases = np.exp(-1j * dt * np.asarray(transform.eigenvalues))
    a = state.amplitudes
    for leg in range(state.particles):
        a = _apply_to_leg(c_dag, a, leg)
        shape = [1] * state.particles
        shape[leg] = state.sites
        a = a * phases.reshape(shape)
        a = _apply_to_leg(c, a, leg)
    return state.with_amplitudes(a)


def evolve_a1(state: FirstQuantState, plan: A1Plan, V: PotentialField,
              W: PairInteraction, transform: MomentumTransform) -> FirstQuantState:
    """Trotterized evolution for ``plan.steps`` steps of ``plan.dt``.

    Lie-Trotter applies the diagonal phases and then the kinetic step;
    Strang wraps a full kinetic step in two half-step diagonal phases.
    """
    energies = diagonal_energies(state.particles, state.sites, V, W, plan.phase_bits)
    dt = plan.dt
    for _ in range(plan.steps):
        if plan.splitting == "lie-trotter-1":
            state = apply_diagonal_phase(state, V, W, dt, energies=energies)
            state = apply_kinetic_step(state, transform, dt)
        else:
            state = apply_diagonal_phase(state, V, W, dt / 2, energies=energies)
            state = apply_kinetic_step(state, transform, dt)
            state = apply_diagonal_phase(state, V, W, dt / 2, energies=energies)
    return state


def qubit_cost_a1(M: int, N: int) -> int:
    """Binary position registers: ``N * ceil(log2 M)`` qubits."""
    return N * (M - 1).bit_length()
