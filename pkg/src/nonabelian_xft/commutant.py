"""Charge-preserving interactions.

An interaction unitary ``U`` on ``A (x) B`` is admissible when it commutes
with ``Q_i^A (x) 1 + 1 (x) Q_i^B`` for every charge ``i``. This module
certifies that condition, solves for every Hermitian generator that satisfies
it, and provides the closed-form two-qubit generalized swap.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, NotUnitary
from .gibbs import Bath, check_compatible
from .matlin import (
    comm_norm,
    dagger,
    frob,
    real_nullspace,
    require_hermitian,
    unitarity_residual,
    unitary_exp,
)

CERTIFICATE_TOL = 1e-10
UNITARITY_TOL = 1e-11
NULLSPACE_TOL = 1e-9

SWAP = np.eye(4, dtype=complex)[[0, 2, 1, 3]]


@dataclass(frozen=True)
class Certificate:
    labels: tuple
    residuals: tuple
    unitarity: float
    tolerance: float = CERTIFICATE_TOL

    @property
    def passed(self) -> bool:
        return all(r <= self.tolerance for r in self.residuals)

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "tolerance": self.tolerance,
            "unitarity_residual": self.unitarity,
            "residuals": {lab: r for lab, r in zip(self.labels, self.residuals)},
        }


@dataclass(frozen=True, eq=False)
class Interaction:
    """A collision unitary, optionally with the constant Hamiltonian behind it.

    When ``hint`` is given, ``u = exp(-i tau hint)``. The generator is only
    needed for the closed-form correction-term cross-check; probabilities use
    ``u`` alone.
    """

    u: np.ndarray
    hint: Optional[np.ndarray] = None
    tau: Optional[float] = None

    @property
    def dim(self) -> int:
        return self.u.shape[0]

    def certify(self, bath_a: Bath, bath_b: Bath, tol: float = CERTIFICATE_TOL) -> Certificate:
        return verify_charge_preserving(self.u, bath_a, bath_b, tol=tol)


def total_charges(bath_a: Bath, bath_b: Bath) -> list:
    """``Q_i^A (x) 1 + 1 (x) Q_i^B`` for each charge."""
    check_compatible(bath_a, bath_b)
    ia = np.eye(bath_a.dim)
    ib = np.eye(bath_b.dim)
    return [np.kron(qa, ib) + np.kron(ia, qb) for qa, qb in zip(bath_a.charges, bath_b.charges)]


def verify_charge_preserving(u, bath_a: Bath, bath_b: Bath, tol: float = CERTIFICATE_TOL) -> Certificate:
    u = np.asarray(u, dtype=complex)
    d = bath_a.dim * bath_b.dim
    if u.shape != (d, d):
        raise DimensionMismatch(f"interaction has shape {u.shape}, baths need ({d}, {d})")
    unit = unitarity_residual(u)
    if unit > UNITARITY_TOL:
        raise NotUnitary(f"||U^dag U - 1||_F = {unit:.3e} exceeds {UNITARITY_TOL:g}")
    residuals = tuple(comm_norm(u, s) for s in total_charges(bath_a, bath_b))
    return Certificate(labels=bath_a.labels, residuals=residuals, unitarity=unit, tolerance=tol)


def hermitian_basis(d: int) -> list:
    """Hilbert-Schmidt orthonormal Hermitian basis of ``d x d`` matrices.

    Order: normalized identity, then symmetric off-diagonal elements for
    ``j < k`` (lexicographic), the antisymmetric ones in the same order, and
    finally the ``d - 1`` traceless diagonal generalized Gell-Mann matrices.
    """
    basis = [np.eye(d, dtype=complex) / np.sqrt(d)]
    pairs = [(j, k) for j in range(d) for k in range(j + 1, d)]
    for j, k in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = m[k, j] = 1 / np.sqrt(2)
        basis.append(m)
    for j, k in pairs:
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = -1j / np.sqrt(2)
        m[k, j] = 1j / np.sqrt(2)
        basis.append(m)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        basis.append(np.diag(diag / np.sqrt(l * (l + 1))).astype(complex))
    return basis


def commutator_map(bath_a: Bath, bath_b: Bath) -> tuple[np.ndarray, list]:
    """Real matrix of ``X -> i[X, S_i]`` stacked over charges, in the Hermitian basis.

    Returns the ``(N d^2) x d^2`` matrix and the basis it is expressed in.
    """
    d = bath_a.dim * bath_b.dim
    basis = hermitian_basis(d)
    cols = np.column_stack([g.reshape(-1) for g in basis])
    rows = np.vstack([g.T.reshape(-1) for g in basis])
    eye = np.eye(d)
    blocks = []
    for s in total_charges(bath_a, bath_b):
        # row-major vec: vec(X S) = (1 (x) S^T) vec X, vec(S X) = (S (x) 1) vec X
        sup = 1j * (np.kron(eye, s.T) - np.kron(s, eye))
        blocks.append(np.real(rows @ sup @ cols))
    return np.vstack(blocks), basis


def solve_allowed_interactions(bath_a: Bath, bath_b: Bath, tol: float = NULLSPACE_TOL) -> list:
    """Orthonormal basis of all Hermitian ``X`` on ``A (x) B`` commuting with every total charge.

    The identity always commutes, so at least one element is returned.
    """
    cmap, basis = commutator_map(bath_a, bath_b)
    kernel = real_nullspace(cmap, tol=tol)
    stack = np.stack(basis)
    out = []
    for coeffs in kernel.T:
        x = np.tensordot(coeffs, stack, axes=1)
        out.append(0.5 * (x + dagger(x)))
    return out


def generalized_swap(alpha: float) -> np.ndarray:
    c, s = np.cos(alpha), np.sin(alpha)
    ph = np.exp(1j * alpha)
    return np.array(
        [
            [ph, 0, 0, 0],
            [0, c, 1j * s, 0],
            [0, 1j * s, c, 0],
            [0, 0, 0, ph],
        ],
        dtype=complex,
    )


def swap_generator(alpha: float) -> np.ndarray:
    """Hamiltonian ``H`` with ``exp(-i H) = SWAP[alpha]`` exactly (unit interaction time).

    ``SWAP[alpha]`` has eigenvalue ``e^{i alpha}`` on the symmetric subspace and
    ``e^{-i alpha}`` on the singlet, i.e. it equals ``exp(i alpha SWAP)``.
    """
    return -alpha * SWAP


def unitary_from_interaction(hint, tau: float) -> Interaction:
    h = require_hermitian(hint, "interaction Hamiltonian")
    return Interaction(u=unitary_exp(h, tau), hint=h, tau=float(tau))


def projection_residual(ops: list, span: list) -> float:
    """Largest Frobenius distance of each op from the linear span of ``span``."""
    mat = np.column_stack([s.reshape(-1) for s in span])
    q, _ = np.linalg.qr(mat)
    worst = 0.0
    for op in ops:
        v = op.reshape(-1)
        worst = max(worst, float(np.linalg.norm(v - q @ (q.conj().T @ v))) / max(frob(op), 1e-300))
    return worst
