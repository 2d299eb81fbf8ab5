"""Four ways to read an eigenvalue out onto an auxiliary register.

All schemes are simulated as dense statevectors. Probe registers are one
qubit with outcomes ``0`` and ``1``; the von Neumann pointer has ``M_p``
position states. Joint states are ordered system-first for the pointer
scheme and probe-first for the circuit schemes.

Outcome labels follow the circuit algebra. With
``G(theta) = |0><0| + exp(-i theta) |1><1|`` between two Hadamards, the
outcome with probability ``(1 + cos theta) / 2`` is ``0``. With pi/2
pulses ``exp(-i pi sigma_y / 4)`` instead, the same law lands on ``1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Literal

import numpy as np
from scipy.optimize import minimize_scalar

from fockforge.lattice import dft_matrix

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PI_HALF = np.array([[1, -1], [1, 1]], dtype=complex) / math.sqrt(2)  # exp(-i pi sigma_y / 4)


@dataclass(frozen=True, eq=False)
class Observable:
    matrix: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("observable must be a square matrix")
        if not np.allclose(a, a.conj().T, rtol=0, atol=1e-12):
            raise ValueError("observable is not Hermitian")
        object.__setattr__(self, "matrix", a)

    @classmethod
    def diagonal(cls, eigenvalues) -> Observable:
        return cls(np.diag(np.asarray(eigenvalues, dtype=float)))

    @cached_property
    def _eigh(self):
        return np.linalg.eigh(self.matrix)

    @property
    def eigenvalues(self) -> np.ndarray:
        return self._eigh[0]

    @property
    def eigenvectors(self) -> np.ndarray:
        return self._eigh[1]

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def evolution(self, t: float) -> np.ndarray:
        """``exp(-i A t)``."""
        w, v = self._eigh
        return (v * np.exp(-1j * w * t)) @ v.conj().T


@dataclass(frozen=True, eq=False)
class PointerRegister:
    """``M_p``-site pointer whose momentum has spectrum ``0..M_p-1``.

    With ``C[k, n] = exp(-2 pi i k n / M_p) / sqrt(M_p)`` and pointer modes
    ``b_k = sum_n a_n C[n, k]``, the momentum ``sum_k k b_k^dag b_k`` has
    position-basis matrix ``C^dag diag(k) C``. For ``M_p = 2`` this is
    ``(1 - sigma_x) / 2``.
    """

    size: int

    @cached_property
    def momentum(self) -> np.ndarray:
        c = dft_matrix(self.size)
        return c.conj().T @ np.diag(np.arange(self.size, dtype=float)) @ c

    def evolution(self, theta: float) -> np.ndarray:
        """``exp(-i theta p)``."""
        c = dft_matrix(self.size)
        return c.conj().T @ np.diag(np.exp(-1j * theta * np.arange(self.size))) @ c


@dataclass(frozen=True, eq=False)
class SchemeResult:
    scheme: str
    distribution: np.ndarray
    state: np.ndarray | None = None

    def __post_init__(self):
        p = np.asarray(self.distribution, dtype=float)
        p = np.where(np.abs(p) < 1e-15, 0.0, p)
        if np.any(p < 0) or abs(p.sum() - 1) > 1e-12:
            raise ValueError("outcome distribution is not a probability vector")
        object.__setattr__(self, "distribution", p)

    def probability(self, outcome: int) -> float:
        return float(self.distribution[outcome])


def _as_observable(A) -> Observable:
    return A if isinstance(A, Observable) else Observable(A)


def _system_vector(system, dim: int) -> np.ndarray:
    v = np.asarray(getattr(system, "amplitudes", system), dtype=complex).reshape(-1)
    if v.size != dim:
        raise ValueError(f"system state has dimension {v.size}, observable {dim}")
    return v / np.linalg.norm(v)


def von_neumann_measure(A, system, pointer_size: int,
                        time: float | None = None) -> SchemeResult:
    """Couple ``A (x) p`` for ``time`` (default ``2 pi / M_p``) and read the pointer.

    The pointer starts at ``x = 0``. For an eigenstate with integer
    eigenvalue in ``[0, M_p)`` and the default time, the pointer lands on
    ``x = lambda`` with certainty; other eigenvalues give the aliased
    distribution.
    """
    A = _as_observable(A)
    psi = _system_vector(system, A.dim)
    pointer = PointerRegister(pointer_size)
    if time is None:
        time = 2 * math.pi / pointer_size
    x0 = np.zeros(pointer_size, dtype=complex)
    x0[0] = 1.0
    coeffs = A.eigenvectors.conj().T @ psi
    joint = np.zeros((A.dim, pointer_size), dtype=complex)
    for lam, vec, c in zip(A.eigenvalues, A.eigenvectors.T, coeffs):
        if c == 0:
            continue
        joint += c * np.outer(vec, pointer.evolution(lam * time) @ x0)
    dist = np.sum(np.abs(joint) ** 2, axis=0)
    return SchemeResult("vn", dist, joint.reshape(-1))


def kitaev_circuit(A, t: float, system) -> SchemeResult:
    """Hadamard, controlled ``exp(-i A t)``, Hadamard, read the probe."""
    A = _as_observable(A)
    psi = _system_vector(system, A.dim)
    state = np.kron(HADAMARD @ np.array([1, 0], dtype=complex), psi)
    d = A.dim
    controlled = np.zeros((2 * d, 2 * d), dtype=complex)
    controlled[:d, :d] = np.eye(d)
    controlled[d:, d:] = A.evolution(t)
    state = controlled @ state
    state = np.kron(HADAMARD, np.eye(d)) @ state
    dist = np.array([np.sum(np.abs(state[:d]) ** 2), np.sum(np.abs(state[d:]) ** 2)])
    return SchemeResult("kitaev", dist, state)


def phase_gate(theta: float) -> np.ndarray:
    return np.diag([1.0, np.exp(-1j * theta)])


def phase_kickback_circuit(lam: float, t: float) -> SchemeResult:
    """Probe-only circuit: Hadamard, ``G(lambda t)``, Hadamard."""
    state = HADAMARD @ phase_gate(lam * t) @ HADAMARD @ np.array([1, 0], dtype=complex)
    return SchemeResult("kickback", np.abs(state) ** 2, state)


def ramsey_protocol(lam: float, t: float,
                    pulse: Literal["hadamard", "pi-half"] = "pi-half") -> SchemeResult:
    """Pulse, free evolution under ``diag(0, lambda)`` for ``t``, pulse."""
    if pulse == "hadamard":
        u = HADAMARD
    elif pulse == "pi-half":
        u = PI_HALF
    else:
        raise ValueError(f"unknown pulse {pulse!r}")
    free = np.diag([1.0, np.exp(-1j * lam * t)])
    state = u @ free @ u @ np.array([1, 0], dtype=complex)
    return SchemeResult(f"ramsey-{pulse}", np.abs(state) ** 2, state)


def generator_identity_check(A, t: float) -> float:
    """Max-norm gap between ``exp(-i t p (x) A)`` and its Hadamard-conjugated form.

    ``p = (1 - sigma_x) / 2``; the conjugated form is
    ``(H (x) 1) exp(-i t (1 - sigma_z)/2 (x) A) (H (x) 1)``, i.e. the
    controlled evolution of the Kitaev circuit between two Hadamards.
    Both exponentials are taken densely.
    """
    a = _as_observable(A).matrix
    d = a.shape[0]
    p = (np.eye(2) - SIGMA_X) / 2
    proj1 = (np.eye(2) - SIGMA_Z) / 2
    lhs = _dense_exp(np.kron(p, a), t)
    hh = np.kron(HADAMARD, np.eye(d))
    rhs = hh @ _dense_exp(np.kron(proj1, a), t) @ hh
    return float(np.max(np.abs(lhs - rhs)))


def _dense_exp(h: np.ndarray, t: float) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


# ---------------------------------------------------------------------------
# eigenvalue estimation from sampled kickback outcomes

@dataclass(frozen=True)
class EigenvalueEstimate:
    """Estimate folded into ``[0, window / 2]``.

    The cosine law cannot tell ``lambda`` from ``-lambda``, and the time
    grid cannot tell ``lambda`` from ``lambda + window``, so only the folded
    value is meaningful: an energy relative to the chosen gauge, never an
    absolute one.
    """

    value: float
    window: float
    times: tuple
    counts: tuple
    shots: int


def _rational_gcd(times) -> Fraction:
    fracs = [Fraction(t).limit_denominator(1 << 20) for t in times]
    num = 0
    den = 1
    for f in fracs:
        den = den * f.denominator // math.gcd(den, f.denominator)
    for f in fracs:
        num = math.gcd(num, f.numerator * (den // f.denominator))
    return Fraction(num, den)


def aliasing_window(times) -> float:
    """``2 pi / g`` with ``g`` the largest step dividing every time."""
    times = list(times)
    if not times or any(not t > 0 for t in times):
        raise ValueError("time grid must be non-empty and strictly positive")
    return 2 * math.pi / float(_rational_gcd(times))


def fold(value: float, window: float) -> float:
    """Reduce modulo ``window`` and reflect into ``[0, window / 2]``."""
    r = math.fmod(value, window)
    if r < 0:
        r += window
    return min(r, window - r)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def estimate_eigenvalue(A, state, times, shots: int, seed) -> EigenvalueEstimate:
    """Sample the kickback probe at each time and fit ``(1 + cos lambda t) / 2``.

    Outcome-0 counts are drawn binomially from the exact Kitaev-circuit
    probabilities. ``lambda`` is fitted by binomial maximum likelihood: a
    grid scan over ``[0, window / 2]`` followed by a bounded refinement
    around the best grid point.
    """
    if shots < 1:
        raise ValueError("shots must be at least 1")
    times = tuple(float(t) for t in times)
    window = aliasing_window(times)
    A = _as_observable(A)
    rng = _rng(seed)
    counts = []
    for t in times:
        p0 = kitaev_circuit(A, t, state).probability(0)
        counts.append(int(rng.binomial(shots, min(max(p0, 0.0), 1.0))))
    k = np.array(counts, dtype=float)
    tt = np.array(times)

    def nll(lam: float) -> float:
        p = np.clip((1 + np.cos(lam * tt)) / 2, 1e-12, 1 - 1e-12)
        return float(-np.sum(k * np.log(p) + (shots - k) * np.log1p(-p)))

    half = window / 2
    n_grid = max(2048, int(64 * half * max(tt)))
    grid = np.linspace(0.0, half, n_grid + 1)
    vals = [nll(g) for g in grid]
    i = int(np.argmin(vals))
    step = grid[1] - grid[0]
    lo, hi = max(0.0, grid[i] - step), min(half, grid[i] + step)
    res = minimize_scalar(nll, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10})
    best = res.x if res.fun <= vals[i] else grid[i]
    return EigenvalueEstimate(fold(float(best), window), window, times, tuple(counts), shots)
