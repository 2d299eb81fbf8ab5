import numpy as np
import pytest

from fockforge.lattice import (
    LatticeSpec,
    PotentialField,
    build_ring_kinetic,
    coulomb_interaction,
)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def ring4():
    """Ring of 4 sites with hopping 1, an uneven potential and unit Coulomb."""
    spec = LatticeSpec(4, "ring")
    return (spec, build_ring_kinetic(spec, 1.0), PotentialField([0.3, -0.2, 0.1, 0.5]),
            coulomb_interaction(spec, 1.0))


def random_unitary(rng, m):
    z = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(rng, d):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (x + x.conj().T) / 2


def random_state(rng, d):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
