"""Dense complex linear algebra for small Hilbert spaces.

All matrices are plain ``numpy`` complex arrays. The Hermitian eigensolver is
a cyclic Jacobi iteration: at the dimensions used here (at most ~16) it is
fast, accurate to a few ulps, and, together with the phase convention below,
fully deterministic, which keeps trajectory tables reproducible byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotHermitian

HERMITIAN_RTOL = 1e-10
DEGENERACY_RTOL = 1e-12
_PHASE_TIE_TOL = 1e-12
_MAX_SWEEPS = 64

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class HermEig:
    """Eigendecomposition of a Hermitian matrix.

    ``values`` are ascending; ``vectors[:, k]`` is the eigenvector of
    ``values[k]``, with its largest-magnitude component real and
    nonnegative (lowest index wins ties).
    """

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.values)

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T

    def min_gap(self) -> float:
        if self.dim < 2:
            return float("inf")
        return float(np.min(np.diff(self.values)))


def as_cmatrix(m) -> np.ndarray:
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def frob(m: np.ndarray) -> float:
    return float(np.linalg.norm(m))


def hermiticity_residual(m: np.ndarray) -> float:
    return frob(m - dagger(m))


def is_hermitian(m: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    return hermiticity_residual(m) <= rtol * max(1.0, frob(m))


def require_hermitian(m, what: str = "matrix") -> np.ndarray:
    a = as_cmatrix(m)
    res = hermiticity_residual(a)
    if res > HERMITIAN_RTOL * max(1.0, frob(a)):
        raise NotHermitian(f"{what} is not Hermitian (||M - M^dag||_F = {res:.3e})")
    return a


def unitarity_residual(u: np.ndarray) -> float:
    return frob(dagger(u) @ u - np.eye(u.shape[0]))


def _phase_fix(v: np.ndarray) -> np.ndarray:
    mags = np.abs(v)
    j = int(np.argmax(mags >= mags.max() - _PHASE_TIE_TOL))
    v = v * (np.conj(v[j]) / mags[j])
    v[j] = mags[j]
    return v


def _canonical_span(basis: np.ndarray, tie_tol: float = _PHASE_TIE_TOL) -> np.ndarray:
    """Orthonormal basis of span(basis) built from projected canonical axes.

    At each step the canonical axis with the largest remaining projection is
    taken (lowest index on ties), and the projector is deflated. The result
    depends only on the subspace, not on the input basis. Columns are
    returned in the order they were picked.
    """
    k = basis.shape[1]
    proj = basis @ basis.conj().T
    picked = []
    for _ in range(k):
        norms = np.sqrt(np.clip(np.real(np.diag(proj)), 0.0, None))
        j = int(np.argmax(norms >= norms.max() - tie_tol))
        v = proj[:, j] / norms[j]
        picked.append((j, v))
        proj = proj - np.outer(v, v.conj())
    return picked


def _jacobi(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = frob(a)
    if n == 1 or scale == 0.0:
        return np.real(np.diag(a)).copy(), v
    prev_off = np.inf
    for _ in range(_MAX_SWEEPS):
        off = frob(a - np.diag(np.diag(a)))
        if off <= 1e-15 * scale or off >= prev_off:
            break
        prev_off = off
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300 or mag <= 1e-18 * scale:
                    continue
                phase = apq / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                g = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ g
    return np.real(np.diag(a)).copy(), v


def herm_eig(m) -> HermEig:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Eigenvalues come out ascending. Inside an exactly (numerically) degenerate
    eigenspace the basis is rebuilt from projections of the canonical axes so
    that it does not depend on the order of the rotations, then each vector's
    global phase is fixed.

    Raises
    ------
    NotHermitian
        If ``||M - M^dag||_F > 1e-10 * max(1, ||M||_F)``.
    """
    a = require_hermitian(m)
    a = 0.5 * (a + dagger(a))
    vals, vecs = _jacobi(a.copy())
    order = np.argsort(vals, kind="stable")
    vals, vecs = vals[order], vecs[:, order]

    tol = DEGENERACY_RTOL * max(1.0, frob(a))
    out = np.empty_like(vecs)
    start = 0
    n = len(vals)
    while start < n:
        stop = start + 1
        while stop < n and vals[stop] - vals[stop - 1] <= tol:
            stop += 1
        if stop - start == 1:
            out[:, start] = _phase_fix(vecs[:, start].copy())
        else:
            picked = sorted(_canonical_span(vecs[:, start:stop]), key=lambda jv: jv[0])
            for k, (_, col) in enumerate(picked):
                out[:, start + k] = _phase_fix(col)
            vals[start:stop] = np.mean(vals[start:stop])
        start = stop
    return HermEig(values=vals, vectors=out)


def expm_hermitian(m, s: float) -> np.ndarray:
    """``exp(s * M)`` for Hermitian ``M`` and real ``s``."""
    eig = herm_eig(m)
    r = (eig.vectors * np.exp(s * eig.values)) @ dagger(eig.vectors)
    return 0.5 * (r + dagger(r))


def unitary_exp(h, tau: float) -> np.ndarray:
    """Propagator ``exp(-i tau H)`` of a constant Hermitian Hamiltonian."""
    eig = herm_eig(h)
    return (eig.vectors * np.exp(-1j * tau * eig.values)) @ dagger(eig.vectors)


def kron(a, b) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def comm_norm(a, b) -> float:
    """Frobenius norm of the commutator ``AB - BA``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise DimensionMismatch(f"commutator of shapes {a.shape} and {b.shape}")
    return frob(a @ b - b @ a)


def real_nullspace(m, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical kernel of a real matrix.

    Singular values at or below ``tol * s_max`` count as zero. The returned
    basis is canonical for the subspace: columns are chosen greedily by
    descending alignment with the coordinate axes, ties to the lowest index.
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    n = a.shape[1]
    if a.size == 0 or not np.any(a):
        kernel = np.eye(n)
    else:
        _, s, vt = np.linalg.svd(a, full_matrices=True)
        rank = int(np.sum(s > tol * s[0]))
        kernel = vt[rank:].T
    if kernel.shape[1] == 0:
        return np.zeros((n, 0))
    cols = [np.real(v) for _, v in _canonical_span(kernel)]
    return np.column_stack(cols)


def same_up_to_phase(u: np.ndarray, v: np.ndarray, atol: float = 1e-9) -> bool:
    """True if ``u = e^{i phi} v`` for some phase, via ``|tr(u^dag v)| = dim``."""
    d = u.shape[0]
    return abs(abs(np.trace(dagger(u) @ v)) - d) <= atol * d
