import math

import numpy as np
import pytest

from conftest import random_state, random_unitary
from fockforge.bridge import (
    CorrespondenceMap,
    compare_evolutions,
    first_to_fock,
    fock_to_first,
    plucker_overlap,
)
from fockforge.firstq import FirstQuantState, antisymmetrize, slater_state
from fockforge.fock import FockState, SecondQuantHamiltonian, build_hamiltonian_matrix, build_sector
from fockforge.lattice import LatticeSpec, PotentialField, build_ring_kinetic, coulomb_interaction
from fockforge.oracle import brute_force_antisym_overlap, dense_expm, first_quant_antisym_spectrum, exact_spectrum


def test_plucker_small_cases(rng):
    c = random_unitary(rng, 4)
    assert plucker_overlap(c, (2,), (4,)) == pytest.approx(c[1, 3])
    assert plucker_overlap(np.eye(3), (1, 2), (1, 2)) == 1
    assert plucker_overlap(np.eye(3), (1, 2), (2, 1)) == -1


def test_plucker_matches_permutation_sum(rng):
    c = random_unitary(rng, 6)
    for _ in range(20):
        j = tuple(sorted(rng.choice(6, 3, replace=False) + 1))
        b = tuple(rng.integers(1, 7, 3))
        assert abs(plucker_overlap(c, j, b) - brute_force_antisym_overlap(c, j, b)) <= 1e-10


def test_plucker_row_linearity(rng):
    c = rng.normal(size=(5, 5))
    scaled = c.copy()
    scaled[1] *= 2.0
    assert plucker_overlap(scaled, (2, 4), (1, 5)) == 2.0 * plucker_overlap(c, (2, 4), (1, 5))


def test_plucker_range_checks():
    with pytest.raises(IndexError):
        plucker_overlap(np.eye(3), (1, 4), (1, 2))
    with pytest.raises(ValueError):
        plucker_overlap(np.eye(3), (2, 1), (1, 2))


def test_first_to_fock_two_sites():
    s = 1 / math.sqrt(2)
    psi = FirstQuantState(2, 2, [[0, s], [-s, 0]])
    out = first_to_fock(psi)
    assert out.amplitudes.tolist() == [0, 0, 0, pytest.approx(1)]


def test_first_to_fock_of_identity_slater():
    out = first_to_fock(slater_state(np.eye(5), (2, 4, 5), 5, 3))
    idx = 0b11010
    assert abs(out.amplitudes[idx] - 1) < 1e-15
    assert abs(out.norm() - 1) < 1e-15


def test_first_to_fock_is_isometric(rng):
    a = antisymmetrize(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)), 2, 4)
    b = antisymmetrize(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)), 2, 4)
    fa, fb = first_to_fock(a), first_to_fock(b)
    assert abs(fa.norm() - 1) <= 1e-10
    assert abs(np.vdot(fa.amplitudes, fb.amplitudes) - np.vdot(a.vector, b.vector)) <= 1e-10


def test_first_to_fock_rejects_symmetric(rng):
    with pytest.raises(ValueError):
        first_to_fock(FirstQuantState(2, 3, np.ones((3, 3)) / 3))


def test_fock_to_first_basis_state():
    psi = fock_to_first(FockState.basis(4, (1, 2)))
    s = 1 / math.sqrt(2)
    assert psi.amplitudes[0, 1] == pytest.approx(s)
    assert psi.amplitudes[1, 0] == pytest.approx(-s)
    assert psi.swap_deviation() == 0


@pytest.mark.parametrize("m,n", [(4, 2), (5, 3), (4, 1)])
def test_round_trip(rng, m, n):
    sector = build_sector(m, n)
    fs = FockState.from_sector(sector, random_state(rng, len(sector)))
    psi = fock_to_first(fs)
    assert psi.swap_deviation() <= 1e-15
    np.testing.assert_allclose(first_to_fock(psi).amplitudes, fs.amplitudes, atol=1e-12)


def test_fock_to_first_rejects_mixed_sectors():
    a = np.zeros(8, dtype=complex)
    a[0b001] = a[0b011] = 1 / math.sqrt(2)
    with pytest.raises(ValueError):
        fock_to_first(FockState(3, a))


def test_correspondence_map():
    cmap = CorrespondenceMap(4, 2)
    assert cmap.normalization == pytest.approx(math.sqrt(2))
    assert cmap.ascending_tuples()[:3] == [(0, 1), (0, 2), (1, 2)]


def test_compare_at_time_zero(ring4):
    _, t, v, w = ring4
    r = compare_evolutions((1, 2), t, v, w, 0.0, 1)
    assert r.oracle_fidelity == pytest.approx(1, abs=1e-14)
    assert r.trotter_fidelity == pytest.approx(1, abs=1e-14)


def test_compare_two_particles(ring4):
    _, t, v, w = ring4
    r = compare_evolutions((1, 2), t, v, w, 1.0, 64)
    assert r.oracle_fidelity >= 1 - 1e-9
    assert r.trotter_fidelity >= 1 - 1e-6


def test_compare_single_particle(ring4):
    _, t, v, w = ring4
    from fockforge.lattice import momentum_transform
    tr = momentum_transform(t)
    for j in range(1, 5):
        r = compare_evolutions((j,), t, v, w, 0.8, 32)
        c = tr.matrix[:, j - 1]
        direct = abs(np.vdot(c, dense_expm(t.entries + np.diag(v.values), 0.8) @ c))
        assert r.survival == pytest.approx(direct, abs=1e-12)
        assert r.oracle_fidelity == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("m,n", [(3, 2), (4, 2), (4, 3), (3, 1)])
def test_spectrum_equality(m, n):
    spec = LatticeSpec(m)
    t = build_ring_kinetic(spec, 1.0)
    v = PotentialField(np.linspace(-0.4, 0.3, m))
    w = coulomb_interaction(spec, 0.8)
    e1 = first_quant_antisym_spectrum(m, n, t, v, w)
    e2 = exact_spectrum(build_hamiltonian_matrix(SecondQuantHamiltonian.from_parts(t, v, w),
                                                 build_sector(m, n)))
    np.testing.assert_allclose(e1, e2, atol=1e-9)
