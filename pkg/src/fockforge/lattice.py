"""Lattice geometry and the one- and two-body Hamiltonian ingredients.

Sites are labelled ``1..M`` in every public function of this module; arrays
are of course indexed from zero, so ``T.entries[p - 1, q - 1]`` is the
hopping amplitude between sites ``p`` and ``q``.

Units: hbar = 1. Energies and times only ever appear as products.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

Geometry = Literal["ring", "line"]


@dataclass(frozen=True)
class LatticeSpec:
    """A one-dimensional lattice of ``sites`` points.

    ``ring`` closes the chain periodically and measures distances with the
    minimum-image convention; ``line`` is open.
    """

    sites: int
    geometry: Geometry = "ring"
    spacing: float = 1.0

    def __post_init__(self):
        if int(self.sites) != self.sites or self.sites < 2:
            raise ValueError(f"a lattice needs at least 2 sites, got {self.sites!r}")
        if self.geometry not in ("ring", "line"):
            raise ValueError(f"unknown geometry {self.geometry!r}")
        if not self.spacing > 0:
            raise ValueError(f"spacing must be positive, got {self.spacing!r}")

    def _check_site(self, p: int) -> None:
        if not 1 <= p <= self.sites:
            raise IndexError(f"site {p} outside 1..{self.sites}")

    def separation(self, p: int, q: int) -> int:
        """Integer number of lattice steps between ``p`` and ``q``."""
        self._check_site(p)
        self._check_site(q)
        n = abs(p - q)
        if self.geometry == "ring":
            n = min(n, self.sites - n)
        return n


def distance(spec: LatticeSpec, p: int, q: int) -> float:
    """Distance between sites ``p`` and ``q`` (minimum image on a ring)."""
    return spec.separation(p, q) * spec.spacing


@dataclass(frozen=True, eq=False)
class KineticMatrix:
    entries: np.ndarray
    time_reversal_broken: bool = False

    def __post_init__(self):
        t = np.array(self.entries, dtype=complex if self.time_reversal_broken else None)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise ValueError("kinetic matrix must be square")
        if not np.allclose(t, t.conj().T, rtol=0, atol=1e-12):
            raise ValueError("kinetic matrix is not Hermitian")
        if not self.time_reversal_broken:
            if np.iscomplexobj(t):
                if np.any(t.imag != 0):
                    raise ValueError(
                        "complex hopping requires time_reversal_broken=True")
                t = t.real
            t = t.astype(float)
        t.setflags(write=False)
        object.__setattr__(self, "entries", t)

    @property
    def sites(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class PotentialField:
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1)
        if not np.all(np.isfinite(v)):
            raise ValueError("potential contains non-finite entries")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def zeros(cls, sites: int) -> PotentialField:
        return cls(np.zeros(sites))

    @property
    def sites(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class PairInteraction:
    """Position-diagonal pair energies ``W[p, q]`` (zero diagonal).

    A ``coulomb`` interaction remembers the lattice and the strength it was
    built from so the pair energies can be recomputed from distances on the
    fly, which is what the fixed-point phase paths do.
    """

    values: np.ndarray
    form: Literal["coulomb", "tabulated"] = "tabulated"
    strength: float | None = None
    lattice: LatticeSpec | None = field(default=None)

    def __post_init__(self):
        w = np.array(self.values, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("pair interaction must be a square matrix")
        if not np.array_equal(w, w.T):
            raise ValueError("pair interaction must be symmetric")
        if np.any(np.diag(w) != 0):
            raise ValueError("pair interaction must have a zero diagonal")
        if self.form == "coulomb" and (self.lattice is None or self.strength is None):
            raise ValueError("coulomb form needs its lattice and strength")
        w.setflags(write=False)
        object.__setattr__(self, "values", w)

    @classmethod
    def zeros(cls, sites: int) -> PairInteraction:
        return cls(np.zeros((sites, sites)))

    @property
    def sites(self) -> int:
        return self.values.shape[0]

    @property
    def is_distance_based(self) -> bool:
        return self.form == "coulomb"


@dataclass(frozen=True, eq=False)
class MomentumTransform:
    """Unitary ``C`` whose columns are kinetic eigenvectors.

    ``C^dagger T C = diag(eigenvalues)``. Eigenvalues are ascending for a
    numerically diagonalized matrix and in DFT index order ``k = 0..M-1``
    when ``is_dft`` is set.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    is_dft: bool = False

    @property
    def sites(self) -> int:
        return self.matrix.shape[0]


def dft_matrix(m: int) -> np.ndarray:
    """``C[k, n] = exp(-2 pi i k n / m) / sqrt(m)``, evaluated entrywise."""
    k = np.arange(m)
    return np.exp(-2j * np.pi * np.outer(k, k) / m) / np.sqrt(m)


def build_ring_kinetic(spec: LatticeSpec, hopping: float) -> KineticMatrix:
    """Nearest-neighbour hopping ``-hopping`` on a periodic ring.

    On two sites both neighbours coincide and the single bond carries
    ``-hopping`` once, giving ``-hopping * sigma_x``.
    """
    if spec.geometry != "ring":
        raise ValueError("ring kinetic matrix requires ring geometry")
    m = spec.sites
    t = np.zeros((m, m))
    for n in range(m):
        t[n, (n + 1) % m] = -hopping
        t[n, (n - 1) % m] = -hopping
    return KineticMatrix(t)


def build_line_kinetic(spec: LatticeSpec, hopping: float) -> KineticMatrix:
    """Open-chain nearest-neighbour hopping."""
    m = spec.sites
    t = np.zeros((m, m))
    for n in range(m - 1):
        t[n, n + 1] = t[n + 1, n] = -hopping
    return KineticMatrix(t)


def coulomb_interaction(spec: LatticeSpec, strength: float) -> PairInteraction:
    if strength < 0:
        raise ValueError("coulomb strength must be non-negative")
    m = spec.sites
    w = np.zeros((m, m))
    for p in range(1, m + 1):
        for q in range(p + 1, m + 1):
            w[p - 1, q - 1] = w[q - 1, p - 1] = strength / distance(spec, p, q)
    return PairInteraction(w, form="coulomb", strength=float(strength), lattice=spec)


def _is_circulant(t: np.ndarray) -> bool:
    m = t.shape[0]
    first = t[0]
    return all(np.array_equal(t[r], np.roll(first, r)) for r in range(1, m))


def momentum_transform(T: KineticMatrix | np.ndarray) -> MomentumTransform:
    """Unitary diagonalizing the kinetic matrix.

    Three cases, tried in order:

    * already diagonal: the identity, eigenvalues in site order;
    * circulant (every ring hopping matrix): the DFT, whose columns are
      used as-is so degenerate +-k pairs are resolved deterministically;
      eigenvalues are the exact circulant values ``sum_m T[0, m] w^(k m)``;
    * anything else: ``numpy.linalg.eigh``, eigenvalues ascending.
    """
    t = T.entries if isinstance(T, KineticMatrix) else np.asarray(T)
    if not np.allclose(t, t.conj().T, rtol=0, atol=1e-12):
        raise ValueError("kinetic matrix is not Hermitian")
    m = t.shape[0]
    if np.count_nonzero(t - np.diag(np.diag(t))) == 0:
        return MomentumTransform(np.eye(m, dtype=complex), np.diag(t).real.copy())
    if _is_circulant(t):
        c = dft_matrix(m)
        n = np.arange(m)
        phases = np.exp(-2j * np.pi * np.outer(n, n) / m)
        eig = (phases @ t[0]).real
        return MomentumTransform(c, eig, is_dft=True)
    eig, vecs = np.linalg.eigh(t)
    return MomentumTransform(vecs.astype(complex), eig)
