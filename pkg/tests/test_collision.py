import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nonabelian_xft import (
    Bath,
    CertificateFailure,
    DegenerateSpectrum,
    IndexOutOfRange,
    Interaction,
    MissingInteractionHamiltonian,
    QubitModelParams,
    build_qubit_model,
    charge_change,
    delta_explicit,
    delta_residual,
    enumerate_trajectories,
    generalized_swap,
    reverse_trajectory,
)
from nonabelian_xft.commutant import swap_generator
from nonabelian_xft.matlin import IDENTITY_2, SIGMA_X, SIGMA_Z

from conftest import random_model
from oracle import enumerate_tpm

affinity = st.floats(-1.5, 1.5).filter(lambda x: abs(x) > 0.05)


def qubit_table(ba, ca, bb, cb, alpha=1.0, explicit=True):
    a, b, inter = build_qubit_model(QubitModelParams(ba, ca, bb, cb, alpha))
    return enumerate_trajectories(a, b, inter, explicit=explicit)


def single_z_table(ba, bb, alpha=1.0):
    a = Bath((SIGMA_Z,), (ba,), ("z",))
    b = Bath((SIGMA_Z,), (bb,), ("z",))
    return enumerate_trajectories(a, b, Interaction(generalized_swap(alpha), swap_generator(alpha), 1.0))


class TestEnumeration:
    def test_sixteen_rows_sorted(self):
        t = qubit_table(0.5, 0.8, 0.5, 0.2)
        assert len(t.rows) == 16
        idx = [r.indices for r in t.rows]
        assert idx == sorted(idx)
        assert math.fsum(t.probs()) == pytest.approx(1, abs=1e-12)

    @given(affinity, affinity, affinity, affinity, st.floats(-3, 3))
    def test_against_oracle(self, ba, ca, bb, cb, alpha):
        t = qubit_table(ba, ca, bb, cb, alpha)
        rows, dlam = enumerate_tpm([SIGMA_Z, SIGMA_X], [SIGMA_Z, SIGMA_X], (ba, ca), (bb, cb), generalized_swap(alpha))
        for r, (idx, p, dq, dh) in zip(t.rows, rows):
            assert r.indices == idx
            assert r.prob == pytest.approx(p, abs=1e-13)
            assert np.allclose(r.dq, dq, atol=1e-12)
            assert r.dhA + r.dhB == pytest.approx(dh, abs=1e-12)
            assert r.delta == pytest.approx(dh - dlam @ dq, abs=1e-12)

    @given(affinity, affinity, affinity, affinity, st.floats(-3, 3))
    def test_conservation_identity_is_exact(self, ba, ca, bb, cb, alpha):
        t = qubit_table(ba, ca, bb, cb, alpha)
        for r in t.rows:
            assert r.dhA + r.dhB == np.dot(t.deltas_lambda, r.dq) + r.delta or math.isclose(
                r.dhA + r.dhB, np.dot(t.deltas_lambda, r.dq) + r.delta, abs_tol=1e-14
            )
            assert r.prob >= 0

    def test_identity_dynamics(self):
        t = qubit_table(0.3, 0.4, 0.8, -0.2, alpha=0.0)
        for r in t.rows:
            if (r.m, r.mu) != (r.n, r.nu):
                assert r.prob < 1e-14
            elif r.prob > 1e-14:
                assert r.dq == (0.0, 0.0) and r.delta == 0

    def test_equal_affinities_conserve_exchange_operator(self):
        t = qubit_table(0.5, 0.8, 0.5, 0.8)
        for r in t.rows:
            if r.prob > 1e-14:
                assert abs(r.dhA + r.dhB) < 1e-12

    def test_reversal_closure(self, rng):
        table = random_model(rng)[0]
        for r in table.rows:
            back = reverse_trajectory(table, r)
            assert back.indices == (r.m, r.mu, r.n, r.nu)
            assert reverse_trajectory(table, back) is r

    def test_certificate_failure(self):
        a = Bath((SIGMA_Z,), (0.3,))
        b = Bath((SIGMA_Z,), (0.7,))
        u = np.kron(SIGMA_X, IDENTITY_2)
        with pytest.raises(CertificateFailure) as exc:
            enumerate_trajectories(a, b, Interaction(u))
        assert exc.value.certificate.residuals[0] > 0.1

    def test_degenerate_spectrum(self):
        a = Bath((SIGMA_Z,), (0.0,))
        b = Bath((SIGMA_Z,), (0.7,))
        with pytest.raises(DegenerateSpectrum):
            enumerate_trajectories(a, b, Interaction(np.eye(4)))

    def test_row_lookup(self):
        t = qubit_table(0.5, 0.8, 0.5, 0.2)
        assert t.row(1, 0, 0, 1).indices == (1, 0, 0, 1)
        with pytest.raises(IndexOutOfRange):
            t.row(2, 0, 0, 0)


class TestChargeChange:
    def test_same_level(self):
        a = build_qubit_model(QubitModelParams(0.3, 0.4, 1, 1))[0]
        assert charge_change(a, 0, 1, 1) == 0

    def test_sigma_z_ground_to_excited(self):
        a = Bath((SIGMA_Z, SIGMA_X), (1.0, 0.0))
        # ground state of +sigma_z is |1> (eigenvalue -1)
        assert charge_change(a, 0, 0, 1) == pytest.approx(2)

    def test_tilted(self):
        a = Bath((SIGMA_Z, SIGMA_X), (0.3, 0.4))
        # <h_-|sigma_z|h_-> = -0.6, <h_+|sigma_z|h_+> = +0.6
        assert charge_change(a, 0, 0, 1) == pytest.approx(1.2, abs=1e-12)

    def test_bad_index(self):
        a = Bath((SIGMA_Z,), (1.0,))
        with pytest.raises(IndexOutOfRange):
            charge_change(a, 1, 0, 1)
        with pytest.raises(IndexOutOfRange):
            charge_change(a, 0, 0, 2)


class TestCorrectionTerm:
    @given(st.floats(-2, 2).filter(lambda x: abs(x) > 0.05), st.floats(-2, 2).filter(lambda x: abs(x) > 0.05), st.floats(-3, 3))
    def test_vanishes_for_single_charge(self, ba, bb, alpha):
        t = single_z_table(ba, bb, alpha)
        for r in t.rows:
            if r.supported:
                assert abs(r.delta) < 1e-12
            if r.delta_explicit is not None:
                assert abs(r.delta_explicit) < 1e-12

    def test_vanishes_without_bias(self):
        t = qubit_table(0.4, -0.9, 0.4, -0.9)
        assert max(abs(r.delta) for r in t.rows if r.supported) < 1e-12

    def test_closed_form_agrees(self):
        t = qubit_table(0.5, 0.8, 0.5, 0.2)
        applicable = [r for r in t.rows if r.delta_explicit is not None]
        assert applicable
        for r in applicable:
            assert abs(r.delta - r.delta_explicit) < 1e-8
            assert abs(r.delta_explicit_imag) < 1e-9
            assert delta_explicit(t, r) == r.delta_explicit
            assert delta_residual(r, t.deltas_lambda) == r.delta

    @given(affinity, affinity, affinity, affinity, st.floats(0.1, 3))
    def test_antisymmetry(self, ba, ca, bb, cb, alpha):
        t = qubit_table(ba, ca, bb, cb, alpha)
        for r in t.rows:
            back = reverse_trajectory(t, r)
            assert r.delta == pytest.approx(-back.delta, abs=1e-12)
            if r.delta_explicit is not None and back.delta_explicit is not None:
                assert r.delta_explicit == pytest.approx(-back.delta_explicit, abs=1e-9)

    def test_diagonal_row_is_self_reverse(self):
        t = qubit_table(0.5, 0.8, 0.5, 0.2)
        r = t.row(1, 0, 1, 0)
        assert reverse_trajectory(t, r) is r
        assert r.delta == 0

    def test_nonzero_for_non_commuting(self):
        t = qubit_table(0.3, 0.1, 0.8, 1.8)
        assert max(abs(r.delta) for r in t.rows if r.supported) > 1e-6

    def test_missing_hint(self):
        t = qubit_table(0.5, 0.8, 0.5, 0.2)
        bare = enumerate_trajectories(t.bath_a, t.bath_b, Interaction(t.interaction.u))
        assert all("no_hint" in r.flags for r in bare.rows)
        with pytest.raises(MissingInteractionHamiltonian):
            delta_explicit(bare, bare.rows[1])

    def test_explicit_off_uses_hint_lazily(self):
        t = qubit_table(0.5, 0.8, 0.5, 0.2, explicit=False)
        full = qubit_table(0.5, 0.8, 0.5, 0.2)
        for r, f in zip(t.rows, full.rows):
            assert delta_explicit(t, r) == f.delta_explicit

    def test_inapplicable_rows_flagged(self):
        t = qubit_table(0.5, 0.8, 0.5, 0.2)
        for r in t.rows:
            assert (r.delta_explicit is None) == ("inapplicable" in r.flags)


@given(affinity, affinity, affinity, affinity, st.floats(0.1, 3))
def test_micro_reversibility(ba, ca, bb, cb, alpha):
    t = qubit_table(ba, ca, bb, cb, alpha)
    for r in t.rows:
        back = reverse_trajectory(t, r)
        if r.prob > 1e-12 and back.prob > 1e-12:
            assert math.log(r.prob / back.prob) == pytest.approx(r.dhA + r.dhB, abs=1e-8)
