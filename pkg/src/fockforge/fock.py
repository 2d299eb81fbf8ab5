"""Second-quantized simulation (A2) and its online variant.

Conventions
-----------
* Mode ``p`` (1-based) is bit ``p - 1`` of the basis index, so the
  occupation string printed mode-1-first, ``00100100``, is index
  ``2**2 + 2**5 = 36``.
* Jordan-Wigner sign: ``a_p^dagger`` and ``a_p`` pick up
  ``(-1)**(number of occupied modes below p)``. With this choice
  ``a^dag_{K1} ... a^dag_{KN} |vac>`` for ascending ``K`` is ``+|K>``.
* The vacuum is the all-zeros bitstring.
* One Trotter step applies, in this order: one-body diagonal phases
  ``h_pp n_p``, the hopping rotations for ``p < q`` in ascending
  lexicographic order, then the pair phases ``W_pq n_p n_q``. Strang
  splitting runs that sequence for ``dt/2`` and then its mirror image for
  another ``dt/2``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from fockforge.fixedpoint import inv_distance_fp
from fockforge.lattice import KineticMatrix, LatticeSpec, PairInteraction, PotentialField

Splitting = Literal["lie-trotter-1", "strang-2"]
SPLITTINGS = ("lie-trotter-1", "strang-2")


def popcount(a) -> np.ndarray:
    return np.bitwise_count(np.asarray(a, dtype=np.int64)).astype(np.int64)


def occupation_string(index: int, modes: int) -> str:
    """Occupation string with mode 1 first, e.g. ``36 -> '00100100'`` for 8 modes."""
    return "".join("1" if index >> p & 1 else "0" for p in range(modes))


def bitstring_index(occupied) -> int:
    """Basis index of the occupation of the given 1-based modes."""
    return sum(1 << (p - 1) for p in set(occupied))


@dataclass(frozen=True, eq=False)
class FockState:
    modes: int
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if a.size != 1 << self.modes:
            raise ValueError(f"expected 2**{self.modes} amplitudes, got {a.size}")
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def vacuum(cls, modes: int) -> FockState:
        a = np.zeros(1 << modes, dtype=complex)
        a[0] = 1.0
        return cls(modes, a)

    @classmethod
    def basis(cls, modes: int, occupied) -> FockState:
        a = np.zeros(1 << modes, dtype=complex)
        a[bitstring_index(occupied)] = 1.0
        return cls(modes, a)

    @classmethod
    def from_sector(cls, sector: SectorBasis, vector) -> FockState:
        a = np.zeros(1 << sector.modes, dtype=complex)
        a[sector.bitstrings] = vector
        return cls(sector.modes, a)

    def restrict(self, sector: SectorBasis) -> np.ndarray:
        return self.amplitudes[sector.bitstrings]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def is_zero(self) -> bool:
        return not np.any(self.amplitudes)

    def particle_numbers(self) -> np.ndarray:
        """Particle numbers carrying non-zero amplitude."""
        return np.unique(popcount(np.flatnonzero(self.amplitudes)))

    def occupations(self) -> np.ndarray:
        prob = np.abs(self.amplitudes) ** 2
        idx = np.arange(prob.size)
        return np.array([prob[(idx >> p) & 1 == 1].sum() for p in range(self.modes)])

    def with_amplitudes(self, amplitudes) -> FockState:
        return replace(self, amplitudes=amplitudes)


@dataclass(frozen=True, eq=False)
class SectorBasis:
    """The ``C(M, N)`` bitstrings with exactly ``N`` particles, ascending."""

    modes: int
    particles: int
    bitstrings: np.ndarray

    def __len__(self) -> int:
        return len(self.bitstrings)

    def index(self, bitstring: int) -> int:
        i = int(np.searchsorted(self.bitstrings, bitstring))
        if i >= len(self.bitstrings) or self.bitstrings[i] != bitstring:
            raise KeyError(f"bitstring {bitstring} is not in the N={self.particles} sector")
        return i


def build_sector(M: int, N: int) -> SectorBasis:
    if not 0 <= N <= M:
        raise ValueError(f"particle number {N} outside 0..{M}")
    bits = sorted(sum(1 << p for p in combo) for combo in itertools.combinations(range(M), N))
    return SectorBasis(M, N, np.array(bits, dtype=np.int64))


def _ladder_indices(M: int, p: int):
    if not 1 <= p <= M:
        raise IndexError(f"mode {p} outside 1..{M}")
    idx = np.arange(1 << M, dtype=np.int64)
    bit = 1 << (p - 1)
    sign = 1 - 2 * (popcount(idx & (bit - 1)) & 1)
    return idx, bit, sign


def apply_ladder(state: FockState, p: int,
                 kind: Literal["create", "annihilate"]) -> FockState:
    """``a_p^dagger`` or ``a_p`` on a Fock state; the result is not renormalized.

    Annihilating an empty mode (or creating in a full one) gives the zero
    vector, which :attr:`FockState.is_zero` reports.
    """
    idx, bit, sign = _ladder_indices(state.modes, p)
    a = state.amplitudes
    out = np.zeros_like(a)
    if kind == "create":
        src = idx[(idx & bit) == 0]
        out[src | bit] = sign[src] * a[src]
    elif kind == "annihilate":
        src = idx[(idx & bit) != 0]
        out[src ^ bit] = sign[src] * a[src]
    else:
        raise ValueError(f"unknown ladder kind {kind!r}")
    return state.with_amplitudes(out)


def ladder_matrix(M: int, p: int, kind: Literal["create", "annihilate"]) -> np.ndarray:
    """Integer matrix of ``a_p^dagger`` or ``a_p`` on the full Fock space."""
    idx, bit, sign = _ladder_indices(M, p)
    mat = np.zeros((1 << M, 1 << M), dtype=np.int64)
    src = idx[(idx & bit) == 0]
    mat[src | bit, src] = sign[src]
    if kind == "create":
        return mat
    if kind == "annihilate":
        return mat.T.copy()
    raise ValueError(f"unknown ladder kind {kind!r}")


@dataclass(frozen=True, eq=False)
class SecondQuantHamiltonian:
    """``sum_pq h_pq a^dag_p a_q + sum_{p<q} W_pq n_p n_q`` with ``h = T + diag(V)``.

    The potential is also kept on its own so the online path can compute
    it from positions instead of reading it out of ``h``.
    """

    one_body: np.ndarray
    pair_diagonal: PairInteraction
    potential: np.ndarray = field(default=None)

    def __post_init__(self):
        h = np.asarray(self.one_body)
        if not np.allclose(h, h.conj().T, rtol=0, atol=1e-12):
            raise ValueError("one-body matrix is not Hermitian")
        object.__setattr__(self, "one_body", h)
        v = np.zeros(h.shape[0]) if self.potential is None else np.asarray(self.potential, float)
        object.__setattr__(self, "potential", v)

    @classmethod
    def from_parts(cls, T: KineticMatrix, V: PotentialField,
                   W: PairInteraction) -> SecondQuantHamiltonian:
        h = np.array(T.entries, dtype=complex if np.iscomplexobj(T.entries) else float)
        h = h + np.diag(V.values)
        return cls(h, W, np.asarray(V.values, float))

    @property
    def modes(self) -> int:
        return self.one_body.shape[0]

    @property
    def kinetic(self) -> np.ndarray:
        return self.one_body - np.diag(self.potential)


def _hop_pairs(M: int, p: int, q: int):
    """Index pairs ``(s_p, s_q)`` linked by moving a particle from mode q to mode p.

    ``s_q`` has q occupied and p empty, ``s_p = s_q ^ bit(p) ^ bit(q)``.
    ``sign`` is ``<s_p| a^dag_p a_q |s_q>``.
    """
    idx = np.arange(1 << M, dtype=np.int64)
    bp, bq = 1 << (p - 1), 1 << (q - 1)
    s_q = idx[((idx & bq) != 0) & ((idx & bp) == 0)]
    s_p = s_q ^ bq ^ bp
    lo, hi = min(bp, bq), max(bp, bq)
    between = (hi - 1) & ~((lo << 1) - 1)
    sign = 1 - 2 * (popcount(s_q & between) & 1)
    return s_p, s_q, sign


def _pair_diagonal(M: int, w: np.ndarray) -> np.ndarray:
    idx = np.arange(1 << M, dtype=np.int64)
    occ = [(idx >> p) & 1 for p in range(M)]
    e = np.zeros(1 << M)
    for p in range(M):
        for q in range(p + 1, M):
            if w[p, q] != 0:
                e += w[p, q] * (occ[p] & occ[q])
    return e


def _one_body_diagonal(M: int, d: np.ndarray) -> np.ndarray:
    idx = np.arange(1 << M, dtype=np.int64)
    e = np.zeros(1 << M, dtype=np.result_type(d, float))
    for p in range(M):
        e = e + d[p] * ((idx >> p) & 1)
    return e


def build_hamiltonian_matrix(H: SecondQuantHamiltonian,
                             sector: SectorBasis | None = None) -> np.ndarray:
    """Dense matrix of ``H`` on the full Fock space, or restricted to ``sector``."""
    M = H.modes
    h = H.one_body
    dim = 1 << M
    mat = np.zeros((dim, dim), dtype=complex)
    diag = _one_body_diagonal(M, np.diag(h)) + _pair_diagonal(M, H.pair_diagonal.values)
    mat[np.arange(dim), np.arange(dim)] = diag
    for p in range(1, M + 1):
        for q in range(1, M + 1):
            if p == q or h[p - 1, q - 1] == 0:
                continue
            s_p, s_q, sign = _hop_pairs(M, p, q)
            mat[s_p, s_q] += h[p - 1, q - 1] * sign
    if sector is not None:
        mat = mat[np.ix_(sector.bitstrings, sector.bitstrings)]
    if not np.iscomplexobj(h) or not np.any(np.imag(h)):
        mat = mat.real.copy()
    return mat


def number_operator(M: int) -> np.ndarray:
    return np.diag(popcount(np.arange(1 << M)).astype(float))


# ---------------------------------------------------------------------------
# Trotter factors

def _apply_diagonal(a: np.ndarray, energies: np.ndarray, dt: float) -> np.ndarray:
    return a * np.exp(-1j * dt * energies)


def _apply_hop(a: np.ndarray, M: int, p: int, q: int, hpq: complex, dt: float) -> np.ndarray:
    """Exact ``exp(-i dt (h_pq a^dag_p a_q + h.c.))`` for ``p < q``.

    On each linked pair the generator is ``[[0, z], [z*, 0]]`` with
    ``z = h_pq * sign``; its exponential is ``cos(r dt) - i sin(r dt) G / r``.
    """
    r = abs(hpq)
    if r == 0 or dt == 0:
        return a
    s_p, s_q, sign = _hop_pairs(M, p, q)
    z = hpq * sign
    c = math.cos(r * dt)
    s = math.sin(r * dt) / r
    ap, aq = a[s_p], a[s_q]
    out = a.copy()
    out[s_p] = c * ap - 1j * s * z * aq
    out[s_q] = c * aq - 1j * s * np.conj(z) * ap
    return out


def _hop_terms(h: np.ndarray):
    M = h.shape[0]
    return [(p, q, h[p - 1, q - 1]) for p in range(1, M + 1) for q in range(p + 1, M + 1)
            if h[p - 1, q - 1] != 0]


def _sequence(a, M, one_body_diag, hops, pair_diag, dt, reverse=False):
    if not reverse:
        a = _apply_diagonal(a, one_body_diag, dt)
        for p, q, hpq in hops:
            a = _apply_hop(a, M, p, q, hpq, dt)
        return _apply_diagonal(a, pair_diag, dt)
    a = _apply_diagonal(a, pair_diag, dt)
    for p, q, hpq in reversed(hops):
        a = _apply_hop(a, M, p, q, hpq, dt)
    return _apply_diagonal(a, one_body_diag, dt)


def trotter_step_a2(state: FockState, H: SecondQuantHamiltonian, dt: float) -> FockState:
    """One first-order step with every integral precomputed."""
    M = H.modes
    if state.modes != M:
        raise ValueError("state and Hamiltonian disagree on the number of modes")
    a = _sequence(state.amplitudes, M, _one_body_diagonal(M, np.diag(H.one_body)),
                  _hop_terms(H.one_body), _pair_diagonal(M, H.pair_diagonal.values), dt)
    return state.with_amplitudes(a)


def online_diagonal_energies(M: int, spec: LatticeSpec, V, W: PairInteraction,
                             bits: int | None) -> np.ndarray:
    """Per-bitstring ``sum_{p occ} V_p + sum_{p<q occ} strength / d(p, q)``.

    Each bitstring's occupied pairs are enumerated and each reciprocal
    distance is evaluated on demand, through :func:`inv_distance_fp` when
    ``bits`` is given and exactly otherwise. No ``M x M`` table is read.
    """
    if not W.is_distance_based:
        raise ValueError("online phases need a distance-based (coulomb) interaction")
    v = np.asarray(getattr(V, "values", V), dtype=float)
    strength = W.strength
    energies = np.zeros(1 << M)
    for s in range(1 << M):
        occupied = [p for p in range(1, M + 1) if s >> (p - 1) & 1]
        e = sum(v[p - 1] for p in occupied)
        for p, q in itertools.combinations(occupied, 2):
            if bits is None:
                inv_d = 1.0 / (spec.separation(p, q) * spec.spacing)
            else:
                inv_d = inv_distance_fp(spec, p, q, bits).value
            e += strength * inv_d
        energies[s] = e
    return energies


def online_diagonal_phase(state: FockState, spec: LatticeSpec, V, W: PairInteraction,
                          dt: float, bits: int | None) -> FockState:
    """Apply the on-the-fly potential and pair phases (``bits=None`` is exact)."""
    e = online_diagonal_energies(state.modes, spec, V, W, bits)
    return state.with_amplitudes(_apply_diagonal(state.amplitudes, e, dt))


@dataclass(frozen=True)
class A2Plan:
    """Trotter plan; ``mode`` is ``"precomputed"`` or ``"online"``.

    In online mode ``phase_bits=None`` means exact reciprocal distances.
    """

    dt: float
    steps: int = 1
    splitting: Splitting = "strang-2"
    mode: Literal["precomputed", "online"] = "precomputed"
    phase_bits: int | None = None

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be at least 1")
        if self.splitting not in SPLITTINGS:
            raise ValueError(f"unknown splitting {self.splitting!r}")
        if self.mode not in ("precomputed", "online"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.phase_bits is not None and self.phase_bits < 1:
            raise ValueError("phase_bits must be positive")


def evolve_a2(state: FockState, plan: A2Plan, H: SecondQuantHamiltonian,
              spec: LatticeSpec | None = None) -> FockState:
    """Trotterized Fock-space evolution.

    Precomputed mode reads every diagonal integral from ``H``. Online mode
    obtains the pair energies from :func:`online_diagonal_energies` instead
    of the ``M x M`` table; ``spec`` defaults to the lattice stored on the
    interaction.
    """
    M = H.modes
    if state.modes != M:
        raise ValueError("state and Hamiltonian disagree on the number of modes")
    if plan.mode == "precomputed":
        one_body_diag = _one_body_diagonal(M, np.diag(H.one_body))
        pair_diag = _pair_diagonal(M, H.pair_diagonal.values)
        hops = _hop_terms(H.one_body)
    else:
        spec = spec or H.pair_diagonal.lattice
        if spec is None:
            raise ValueError("online mode needs the lattice geometry")
        # same factor order as precomputed mode; only pair energies come online
        one_body_diag = _one_body_diagonal(M, np.diag(H.one_body))
        pair_diag = online_diagonal_energies(M, spec, np.zeros(M), H.pair_diagonal,
                                             plan.phase_bits)
        hops = _hop_terms(H.kinetic)
    a = state.amplitudes
    for _ in range(plan.steps):
        if plan.splitting == "lie-trotter-1":
            a = _sequence(a, M, one_body_diag, hops, pair_diag, plan.dt)
        else:
            a = _sequence(a, M, one_body_diag, hops, pair_diag, plan.dt / 2)
            a = _sequence(a, M, one_body_diag, hops, pair_diag, plan.dt / 2, reverse=True)
    return state.with_amplitudes(a)


def qubit_cost_a2(M: int) -> int:
    """One qubit per mode in the occupation-number encoding."""
    if M < 1:
        raise ValueError("need at least one mode")
    return M
