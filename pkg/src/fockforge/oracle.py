"""Brute-force references.

Nothing here imports the simulation modules: tuples are enumerated with
``itertools``, permutation signs are counted by inversions, and every
operator is assembled as an explicit dense matrix. Agreement between these
routines and the fast paths is therefore evidence, not a tautology.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

MAX_FIRST_QUANT_DIM = 2**20
MAX_FOCK_MODES = 14
MAX_PERMUTATION_N = 6


class SizeGuardError(RuntimeError):
    """A dense reference would exceed its size guard."""


@dataclass(frozen=True, eq=False)
class DenseOperator:
    matrix: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.matrix)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("dense operator must be square")
        if not np.all(np.isfinite(a)):
            raise ValueError("dense operator has non-finite entries")
        object.__setattr__(self, "matrix", a)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _matrix(h) -> np.ndarray:
    if isinstance(h, DenseOperator):
        return h.matrix
    for attr in ("entries", "values", "matrix"):
        if hasattr(h, attr):
            return np.asarray(getattr(h, attr))
    return np.asarray(h)


def _check_hermitian(a: np.ndarray, atol: float) -> None:
    if not np.allclose(a, a.conj().T, rtol=0, atol=atol):
        raise ValueError("operator is not Hermitian")


def dense_expm(h, t: float) -> np.ndarray:
    """``exp(-i h t)`` through the eigendecomposition of Hermitian ``h``."""
    a = _matrix(h)
    _check_hermitian(a, 1e-10)
    w, v = np.linalg.eigh(a)
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def exact_spectrum(h) -> np.ndarray:
    a = _matrix(h)
    _check_hermitian(a, 1e-10)
    return np.linalg.eigvalsh(a)


def permutation_sign(perm) -> int:
    inversions = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm))
                     if perm[i] > perm[j])
    return -1 if inversions % 2 else 1


def brute_force_antisym_overlap(C, J, B) -> complex:
    """Signed permutation sum ``sum_pi sgn(pi) prod_i C[j_i, b_pi(i)]``.

    ``J`` and ``B`` hold 1-based site labels.
    """
    c = np.asarray(C)
    n = len(J)
    if len(B) != n:
        raise ValueError("row and column tuples differ in length")
    if n > MAX_PERMUTATION_N:
        raise SizeGuardError(f"permutation sum over {n}! terms exceeds the N <= 6 guard")
    total = 0j
    for perm in itertools.permutations(range(n)):
        term = complex(permutation_sign(perm))
        for i in range(n):
            term *= c[J[i] - 1, B[perm[i]] - 1]
        total += term
    return total


def first_quant_hamiltonian_dense(M: int, N: int, T, V, W) -> np.ndarray:
    """Dense ``sum_i T^(i) + sum_i V(x_i) + sum_{i<j} W(x_i, x_j)`` on ``M**N`` tuples.

    Tuples are ordered row-major with particle 1 slowest, matching
    ``itertools.product``.
    """
    dim = M**N
    if dim > MAX_FIRST_QUANT_DIM:
        raise SizeGuardError(f"M**N = {dim} exceeds the 2**20 guard")
    t = _matrix(T)
    v = _matrix(V).reshape(-1)
    w = _matrix(W)
    tuples = list(itertools.product(range(M), repeat=N))
    index = {x: i for i, x in enumerate(tuples)}
    h = np.zeros((dim, dim), dtype=complex)
    for col, x in enumerate(tuples):
        diag = sum(v[xi] for xi in x)
        diag += sum(w[x[i], x[j]] for i in range(N) for j in range(i + 1, N))
        h[col, col] += diag
        for i in range(N):
            for y in range(M):
                amp = t[y, x[i]]
                if amp != 0:
                    row = index[x[:i] + (y,) + x[i + 1:]]
                    h[row, col] += amp
    return h


def particle_permutation_operator(M: int, N: int, perm) -> np.ndarray:
    """Dense operator relabelling particles: ``(P psi)(x) = psi(x[perm])``."""
    tuples = list(itertools.product(range(M), repeat=N))
    index = {x: i for i, x in enumerate(tuples)}
    p = np.zeros((M**N, M**N))
    for row, x in enumerate(tuples):
        p[row, index[tuple(x[k] for k in perm)]] = 1.0
    return p


def antisymmetric_basis(M: int, N: int) -> np.ndarray:
    """Orthonormal columns spanning the antisymmetric subspace of ``M**N`` tuples.

    One column per strictly ascending tuple, with amplitude
    ``sgn(pi) / sqrt(N!)`` on each of its permutations.
    """
    dim = M**N
    if dim > MAX_FIRST_QUANT_DIM:
        raise SizeGuardError(f"M**N = {dim} exceeds the 2**20 guard")
    strides = [M ** (N - 1 - i) for i in range(N)]
    combos = list(itertools.combinations(range(M), N))
    basis = np.zeros((dim, len(combos)))
    norm = 1 / math.sqrt(math.factorial(N))
    for col, k in enumerate(combos):
        for perm in itertools.permutations(range(N)):
            flat = sum(k[perm[i]] * strides[i] for i in range(N))
            basis[flat, col] = permutation_sign(perm) * norm
    return basis


def first_quant_antisym_spectrum(M: int, N: int, T, V, W) -> np.ndarray:
    """Spectrum of the first-quantized Hamiltonian on its antisymmetric subspace."""
    if N == 0:
        return np.zeros(1)
    h = first_quant_hamiltonian_dense(M, N, T, V, W)
    b = antisymmetric_basis(M, N)
    return exact_spectrum(b.T @ h @ b)
