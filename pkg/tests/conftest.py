import numpy as np
import pytest
from hypothesis import settings

from nonabelian_xft import Bath, DegenerateSpectrum, enumerate_trajectories, solve_allowed_interactions
from nonabelian_xft.commutant import unitary_from_interaction

from oracle import spin_ops

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def _random_hermitian(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2


def _random_charges(rng):
    """Charges for both baths: rotated spin operators, or shared random Hermitians on equal dims."""
    if rng.random() < 0.5:
        da, db = rng.integers(2, 4, size=2)
        n1 = rng.normal(size=3)
        n2 = rng.normal(size=3)
        qa = [sum(c * j for c, j in zip(n, spin_ops(da))) for n in (n1, n2)]
        qb = [sum(c * j for c, j in zip(n, spin_ops(db))) for n in (n1, n2)]
        return qa, qb
    d = int(rng.integers(2, 4))
    qs = [_random_hermitian(rng, d) for _ in range(int(rng.integers(1, 3)))]
    return qs, [q.copy() for q in qs]


def random_model(rng, explicit=True):
    """A random charge-preserving model, resampled until both exchange spectra are nondegenerate.

    Returns ``(table, qa, qb, lam_a, lam_b, u)``.
    """
    while True:
        qa, qb = _random_charges(rng)
        lam_a = rng.uniform(-1, 1, size=len(qa))
        lam_b = rng.uniform(-1, 1, size=len(qa))
        bath_a = Bath(tuple(qa), tuple(lam_a))
        bath_b = Bath(tuple(qb), tuple(lam_b))
        basis = solve_allowed_interactions(bath_a, bath_b)
        hint = sum(c * x for c, x in zip(rng.normal(size=len(basis)), basis))
        inter = unitary_from_interaction(hint, rng.uniform(0.2, 2.0))
        try:
            table = enumerate_trajectories(bath_a, bath_b, inter, explicit=explicit)
        except DegenerateSpectrum:
            continue
        return table, qa, qb, lam_a, lam_b, inter.u


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
