import itertools
from functools import reduce
from math import comb

import numpy as np
import pytest

from conftest import random_state
from fockforge.fock import (
    A2Plan,
    FockState,
    SecondQuantHamiltonian,
    apply_ladder,
    bitstring_index,
    build_hamiltonian_matrix,
    build_sector,
    evolve_a2,
    ladder_matrix,
    number_operator,
    occupation_string,
    online_diagonal_phase,
    qubit_cost_a2,
    trotter_step_a2,
)
from fockforge.lattice import (
    KineticMatrix,
    LatticeSpec,
    PairInteraction,
    PotentialField,
    build_ring_kinetic,
    coulomb_interaction,
)
from fockforge.oracle import dense_expm, exact_spectrum

SIGMA_MINUS = np.array([[0, 1], [0, 0]])
Z = np.diag([1, -1])
I2 = np.eye(2, dtype=int)


def jw_annihilator(m, p):
    """Kronecker-product Jordan-Wigner a_p; mode 1 is the last (least significant) factor."""
    factors = []
    for mode in range(m, 0, -1):
        factors.append(SIGMA_MINUS if mode == p else Z if mode < p else I2)
    return reduce(np.kron, factors)


def jw_hamiltonian(h, w):
    m = h.shape[0]
    a = [jw_annihilator(m, p) for p in range(1, m + 1)]
    n = [x.T @ x for x in a]
    out = sum(h[p, q] * a[p].T @ a[q] for p in range(m) for q in range(m))
    out = out + sum(w[p, q] * n[p] @ n[q] for p in range(m) for q in range(p + 1, m))
    return out


def test_unary_pair_state_index():
    state = apply_ladder(apply_ladder(FockState.vacuum(8), 6, "create"), 3, "create")
    idx = np.flatnonzero(state.amplitudes)
    assert idx.tolist() == [bitstring_index((3, 6))] == [36]
    assert state.amplitudes[36] == 1
    assert occupation_string(36, 8) == "00100100"


def test_annihilate_vacuum_is_zero():
    out = apply_ladder(FockState.vacuum(3), 1, "annihilate")
    assert out.is_zero and out.norm() == 0


def test_two_mode_anticommutators():
    a1 = ladder_matrix(2, 1, "annihilate")
    c1 = ladder_matrix(2, 1, "create")
    c2 = ladder_matrix(2, 2, "create")
    assert np.array_equal(a1 @ c2 + c2 @ a1, np.zeros((4, 4)))
    assert np.array_equal(a1 @ c1 + c1 @ a1, np.eye(4))


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_ladder_matches_kron_construction(m):
    for p in range(1, m + 1):
        assert np.array_equal(ladder_matrix(m, p, "annihilate"), jw_annihilator(m, p))


@pytest.mark.parametrize("m", [3, 4])
def test_apply_ladder_matches_matrix(rng, m):
    psi = FockState(m, random_state(rng, 2**m))
    for p in range(1, m + 1):
        for kind in ("create", "annihilate"):
            np.testing.assert_allclose(apply_ladder(psi, p, kind).amplitudes,
                                       ladder_matrix(m, p, kind) @ psi.amplitudes, atol=1e-15)


def test_pauli_exclusion():
    for p in range(1, 5):
        c = ladder_matrix(4, p, "create")
        assert not np.any(c @ c)


def test_build_sector_examples():
    s = build_sector(4, 2)
    assert [format(int(b), "04b") for b in s.bitstrings] == ["0011", "0101", "0110", "1001",
                                                            "1010", "1100"]
    assert build_sector(3, 0).bitstrings.tolist() == [0]
    assert len(build_sector(8, 2)) == comb(8, 2) == 28
    with pytest.raises(ValueError):
        build_sector(3, 4)


def test_sector_index_lookup():
    s = build_sector(5, 2)
    for i, b in enumerate(s.bitstrings):
        assert s.index(int(b)) == i
    with pytest.raises(KeyError):
        s.index(0b111)


def test_one_particle_block_reproduces_h():
    spec = LatticeSpec(2)
    v = PotentialField([0.4, -0.3])
    H = SecondQuantHamiltonian.from_parts(build_ring_kinetic(spec, 1.0), v, PairInteraction.zeros(2))
    mat = build_hamiltonian_matrix(H, build_sector(2, 1))
    np.testing.assert_allclose(mat, [[0.4, -1], [-1, -0.3]])


def test_pair_only_sector_matrix(ring4):
    spec, _, _, w = ring4
    H = SecondQuantHamiltonian(np.zeros((4, 4)), w)
    sector = build_sector(4, 2)
    mat = build_hamiltonian_matrix(H, sector)
    assert np.count_nonzero(mat - np.diag(np.diag(mat))) == 0
    for i, b in enumerate(sector.bitstrings):
        occ = [p for p in range(1, 5) if b >> (p - 1) & 1]
        expected = sum(1 / spec.separation(p, q) for p, q in itertools.combinations(occ, 2))
        assert mat[i, i] == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_hamiltonian_matches_jordan_wigner_oracle(rng, m):
    x = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    h = x + x.conj().T
    wr = np.abs(rng.normal(size=(m, m)))
    wr = np.triu(wr, 1)
    w = PairInteraction(wr + wr.T)
    mat = build_hamiltonian_matrix(SecondQuantHamiltonian(h, w))
    np.testing.assert_allclose(mat, jw_hamiltonian(h, w.values), atol=1e-12)


def test_hamiltonian_hermitian_number_conserving_and_sector_spectrum(ring4):
    _, t, v, w = ring4
    H = SecondQuantHamiltonian.from_parts(t, v, w)
    full = build_hamiltonian_matrix(H)
    assert np.max(np.abs(full - full.conj().T)) <= 1e-12
    nop = number_operator(4)
    assert np.max(np.abs(full @ nop - nop @ full)) <= 1e-12
    full_spec = exact_spectrum(full)
    for n in range(5):
        for e in exact_spectrum(build_hamiltonian_matrix(H, build_sector(4, n))):
            assert np.min(np.abs(full_spec - e)) <= 1e-9


def test_trotter_step_dt_zero(ring4, rng):
    _, t, v, w = ring4
    psi = FockState(4, random_state(rng, 16))
    out = trotter_step_a2(psi, SecondQuantHamiltonian.from_parts(t, v, w), 0.0)
    np.testing.assert_allclose(out.amplitudes, psi.amplitudes, atol=1e-15)


def test_single_hopping_term_exact():
    h = np.array([[0.0, -0.8], [-0.8, 0.0]])
    H = SecondQuantHamiltonian(h, PairInteraction.zeros(2))
    sector = build_sector(2, 1)
    psi = FockState.from_sector(sector, [0.6, 0.8j])
    out = trotter_step_a2(psi, H, 0.9)
    ref = dense_expm(build_hamiltonian_matrix(H, sector), 0.9) @ psi.restrict(sector)
    np.testing.assert_allclose(out.restrict(sector), ref, atol=1e-14)


def test_hop_sign_across_occupied_modes():
    # a hop from mode 3 to mode 1 passes over an occupied mode 2
    h = np.zeros((3, 3))
    h[0, 2] = h[2, 0] = 1.0
    H = SecondQuantHamiltonian(h, PairInteraction.zeros(3))
    psi = FockState.basis(3, (2, 3))
    out = trotter_step_a2(psi, H, 0.4)
    ref = dense_expm(build_hamiltonian_matrix(H), 0.4) @ psi.amplitudes
    np.testing.assert_allclose(out.amplitudes, ref, atol=1e-14)
    ref_jw = dense_expm(jw_hamiltonian(h, np.zeros((3, 3))), 0.4) @ psi.amplitudes
    np.testing.assert_allclose(out.amplitudes, ref_jw, atol=1e-14)


def test_trotter_factors_unitary(ring4, rng):
    _, t, v, w = ring4
    H = SecondQuantHamiltonian.from_parts(t, v, w)
    for _ in range(5):
        psi = FockState(4, random_state(rng, 16))
        assert abs(trotter_step_a2(psi, H, rng.normal()).norm() - 1) < 1e-12


def test_online_phase_sites_three_and_six():
    spec = LatticeSpec(8)
    xi = 0.61
    psi = FockState.basis(8, (3, 6))
    out = online_diagonal_phase(psi, spec, np.zeros(8), coulomb_interaction(spec, 1.0), xi, None)
    assert out.amplitudes[36] == pytest.approx(np.exp(-1j * xi / 3), abs=1e-15)


def test_online_phase_vacuum_untouched():
    spec = LatticeSpec(8)
    out = online_diagonal_phase(FockState.vacuum(8), spec, np.zeros(8),
                                coulomb_interaction(spec, 1.0), 0.3, 8)
    assert out.amplitudes[0] == 1


def test_online_phase_rejects_tabulated():
    with pytest.raises(ValueError):
        online_diagonal_phase(FockState.vacuum(3), LatticeSpec(3), np.zeros(3),
                              PairInteraction.zeros(3), 0.1, 8)


def test_online_matches_precomputed_diagonal(rng):
    spec = LatticeSpec(8)
    w = coulomb_interaction(spec, 1.0)
    v = rng.normal(size=8)
    H = SecondQuantHamiltonian(np.diag(v), w, v)
    diag = np.diag(build_hamiltonian_matrix(H)).real
    for _ in range(3):
        psi = FockState(8, random_state(rng, 256))
        ref = psi.amplitudes * np.exp(-1j * 0.2 * diag)
        exact = online_diagonal_phase(psi, spec, v, w, 0.2, None)
        b24 = online_diagonal_phase(psi, spec, v, w, 0.2, 24)
        np.testing.assert_allclose(exact.amplitudes, ref, atol=1e-12)
        assert np.max(np.abs(b24.amplitudes - ref)) <= 1e-6


@pytest.mark.parametrize("splitting", ["lie-trotter-1", "strang-2"])
def test_precomputed_equals_online_exact(ring4, rng, splitting):
    spec, t, v, w = ring4
    H = SecondQuantHamiltonian.from_parts(t, v, w)
    psi = FockState(4, random_state(rng, 16))
    a = evolve_a2(psi, A2Plan(0.1, 7, splitting), H)
    b = evolve_a2(psi, A2Plan(0.1, 7, splitting, "online", None), H, spec)
    np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-12)


def test_strang_against_sector_oracle(ring4):
    _, t, v, w = ring4
    H = SecondQuantHamiltonian.from_parts(t, v, w)
    sector = build_sector(4, 2)
    psi = FockState.basis(4, (1, 2))
    exact = dense_expm(build_hamiltonian_matrix(H, sector), 1.0) @ psi.restrict(sector)
    e64 = np.linalg.norm(evolve_a2(psi, A2Plan(1 / 64, 64), H).restrict(sector) - exact)
    e128 = np.linalg.norm(evolve_a2(psi, A2Plan(1 / 128, 128), H).restrict(sector) - exact)
    assert e64 <= 1e-2
    assert 3.6 <= e64 / e128 <= 4.4


def test_number_conservation(ring4, rng):
    _, t, v, w = ring4
    H = SecondQuantHamiltonian.from_parts(t, v, w)
    sector = build_sector(4, 2)
    psi = FockState.from_sector(sector, random_state(rng, len(sector)))
    out = evolve_a2(psi, A2Plan(0.2, 10, "lie-trotter-1"), H)
    outside = np.delete(out.amplitudes, sector.bitstrings)
    assert np.max(np.abs(outside)) <= 1e-12


def test_complex_hopping_evolution(rng):
    x = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    t = KineticMatrix(x + x.conj().T, time_reversal_broken=True)
    H = SecondQuantHamiltonian.from_parts(t, PotentialField.zeros(3), PairInteraction.zeros(3))
    psi = FockState(3, random_state(rng, 8))
    exact = dense_expm(build_hamiltonian_matrix(H), 0.5) @ psi.amplitudes
    out = evolve_a2(psi, A2Plan(0.5 / 200, 200), H)
    assert np.linalg.norm(out.amplitudes - exact) < 1e-4


@pytest.mark.parametrize("m", [8, 2, 12])
def test_qubit_cost_a2(m):
    assert qubit_cost_a2(m) == m
