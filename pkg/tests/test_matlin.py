import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given
from hypothesis import strategies as st

from nonabelian_xft.errors import DimensionMismatch, NotHermitian
from nonabelian_xft.matlin import (
    IDENTITY_2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    comm_norm,
    expm_hermitian,
    herm_eig,
    kron,
    real_nullspace,
    same_up_to_phase,
    unitarity_residual,
    unitary_exp,
)
from nonabelian_xft.commutant import generalized_swap


def hermitian(seed, d):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2


def check_eig(m, eig, tol=1e-12):
    scale = max(1.0, np.linalg.norm(m))
    for k in range(eig.dim):
        v = eig.vectors[:, k]
        assert np.linalg.norm(m @ v - eig.values[k] * v) <= tol * scale * 10
    assert np.allclose(eig.vectors.conj().T @ eig.vectors, np.eye(eig.dim), atol=1e-12)
    for k in range(eig.dim):
        v = eig.vectors[:, k]
        j = int(np.argmax(np.abs(v)))
        assert abs(v[j].imag) < 1e-12 and v[j].real >= 0


class TestHermEig:
    def test_sigma_z(self):
        eig = herm_eig(SIGMA_Z)
        assert np.allclose(eig.values, [-1, 1])
        assert np.allclose(eig.vectors[:, 0], [0, 1])
        assert np.allclose(eig.vectors[:, 1], [1, 0])

    def test_closed_form_two_by_two(self):
        eig = herm_eig(0.3 * SIGMA_Z + 0.4 * SIGMA_X)
        assert np.allclose(eig.values, [-0.5, 0.5], atol=1e-14)

    def test_identity_gives_orthonormal_basis(self):
        eig = herm_eig(np.eye(4))
        assert np.allclose(eig.values, 1)
        check_eig(np.eye(4), eig)

    def test_degenerate_basis_is_deterministic(self):
        m = hermitian(3, 4)
        w, v = np.linalg.eigh(m)
        # plant a doubly degenerate eigenvalue
        m2 = (v * np.array([w[0], w[0], w[2], w[3]])) @ v.conj().T
        a, b = herm_eig(m2), herm_eig(m2.copy())
        assert np.array_equal(a.vectors, b.vectors)
        check_eig(m2, a)

    @given(st.integers(0, 10_000), st.integers(1, 16))
    def test_matches_numpy(self, seed, d):
        m = hermitian(seed, d)
        eig = herm_eig(m)
        assert np.allclose(eig.values, np.linalg.eigvalsh(m), atol=1e-12 * max(1, np.linalg.norm(m)))
        check_eig(m, eig)
        assert np.linalg.norm(eig.reconstruct() - m) <= 1e-12 * max(1, np.linalg.norm(m)) * d

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            herm_eig(np.array([[0, 1], [0, 0]]))

    def test_rejects_bad_shapes(self):
        with pytest.raises(DimensionMismatch):
            herm_eig(np.zeros((2, 3)))
        with pytest.raises(ValueError):
            herm_eig(np.array([[np.nan, 0], [0, 1]]))


class TestExponentials:
    def test_diagonal(self):
        b = 0.7
        assert np.allclose(expm_hermitian(SIGMA_Z, -b), np.diag([math.exp(-b), math.exp(b)]))

    def test_zero_scale_is_identity(self):
        assert np.allclose(expm_hermitian(hermitian(1, 3), 0.0), np.eye(3))
        assert np.allclose(unitary_exp(hermitian(1, 3), 0.0), np.eye(3))

    def test_trace_two_by_two(self):
        tr = np.trace(expm_hermitian(0.3 * SIGMA_Z + 0.4 * SIGMA_X, -1)).real
        assert tr == pytest.approx(2 * math.cosh(0.5), abs=1e-12)
        assert tr == pytest.approx(2.2552519, abs=1e-7)

    def test_sigma_z_pi(self):
        assert np.allclose(unitary_exp(SIGMA_Z, math.pi), -np.eye(2), atol=1e-14)

    @given(st.integers(0, 10_000), st.integers(1, 9), st.floats(-3, 3))
    def test_against_scipy(self, seed, d, s):
        m = hermitian(seed, d)
        assert np.allclose(expm_hermitian(m, s), sla.expm(s * m), rtol=1e-10, atol=1e-10)
        u = unitary_exp(m, s)
        assert np.allclose(u, sla.expm(-1j * s * m), atol=1e-11)

    @pytest.mark.parametrize("seed", range(100))
    def test_unitarity(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 10))
        assert unitarity_residual(unitary_exp(hermitian(seed, d), rng.uniform(-5, 5))) < 1e-11


class TestKronAndCommutator:
    def test_kron(self):
        assert np.allclose(kron(SIGMA_Z, IDENTITY_2), np.diag([1, 1, -1, -1]))
        assert np.allclose(kron(IDENTITY_2, IDENTITY_2), np.eye(4))
        assert kron(SIGMA_X, SIGMA_X)[0, 3] == 1

    def test_comm_norm(self):
        assert comm_norm(SIGMA_X, SIGMA_Y) == pytest.approx(2 * math.sqrt(2))
        assert comm_norm(SIGMA_Z, SIGMA_Z) == 0
        total = kron(SIGMA_Z, IDENTITY_2) + kron(IDENTITY_2, SIGMA_Z)
        assert comm_norm(generalized_swap(0.37), total) < 1e-12

    def test_comm_norm_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            comm_norm(np.eye(2), np.eye(3))


class TestNullspace:
    def test_simple(self):
        k = real_nullspace(np.array([[1.0, 0], [0, 0]]))
        assert k.shape == (2, 1)
        assert np.allclose(np.abs(k[:, 0]), [0, 1])

    def test_zero_matrix(self):
        k = real_nullspace(np.zeros((2, 2)))
        assert np.allclose(k.T @ k, np.eye(2))

    def test_full_rank(self):
        assert real_nullspace(np.eye(3)).shape == (3, 0)

    @given(st.integers(0, 10_000), st.integers(1, 6), st.integers(1, 8))
    def test_random_low_rank(self, seed, rank, extra):
        rng = np.random.default_rng(seed)
        n = rank + extra
        m = rng.normal(size=(n + 2, rank)) @ rng.normal(size=(rank, n))
        k = real_nullspace(m)
        assert k.shape == (n, n - np.linalg.matrix_rank(m))
        assert np.allclose(m @ k, 0, atol=1e-9 * np.linalg.norm(m))
        assert np.allclose(k.T @ k, np.eye(k.shape[1]), atol=1e-12)


def test_same_up_to_phase():
    u = generalized_swap(0.4)
    assert same_up_to_phase(u, np.exp(0.3j) * u)
    assert not same_up_to_phase(u, generalized_swap(0.5))
