"""Two-point-measurement trajectories of a single collision.

A trajectory ``(n, nu) -> (m, mu)`` records the outcomes of measuring the
exchange operators of both units before and after the interaction. For each
one we store its probability, the eigenvalue changes, the charge changes
measured on unit A, and the non-commutativity correction ``delta``.

``delta`` is defined as the residual of the conservation relation
``dhA + dhB = sum_i dlam_i dq_i + delta``. It exists for every trajectory and
is exactly antisymmetric under reversal. The closed-form expression built
from interaction-Hamiltonian matrix elements is kept as an independent
cross-check (:func:`delta_explicit`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .commutant import CERTIFICATE_TOL, Interaction
from .errors import (
    CertificateFailure,
    DegenerateSpectrum,
    IndexOutOfRange,
    MissingInteractionHamiltonian,
)
from .gibbs import Bath, affinity_shift
from .matlin import HermEig, dagger, frob

SUPPORT_THRESHOLD = 1e-14
NONDEGENERACY_RTOL = 1e-9
EXPLICIT_RTOL = 1e-12


@dataclass(frozen=True)
class Trajectory:
    n: int
    nu: int
    m: int
    mu: int
    prob: float
    dhA: float
    dhB: float
    dq: tuple
    delta: float
    # None means the closed form does not apply (vanishing H_int element or no H_int)
    delta_explicit: Optional[float] = None
    delta_explicit_imag: Optional[float] = None
    flags: tuple = ()

    @property
    def indices(self) -> tuple:
        return (self.n, self.nu, self.m, self.mu)

    @property
    def supported(self) -> bool:
        return "unsupported" not in self.flags


@dataclass(frozen=True)
class _EigenFrame:
    """Eigen-data shared by all rows of one table."""

    eig_a: HermEig
    eig_b: HermEig
    charges_a: tuple  # Q_i^A in the eigenbasis of the exchange operator of A
    hint: Optional[np.ndarray]  # H_int in the product eigenbasis, shape (dA, dB, dA, dB)
    hint_norm: float  # 1 after normalization, 0 for a vanishing generator


@dataclass(frozen=True, eq=False)
class TrajectoryTable:
    bath_a: Bath
    bath_b: Bath
    interaction: Interaction
    rows: tuple
    deltas_lambda: np.ndarray
    support_threshold: float = SUPPORT_THRESHOLD
    frame: _EigenFrame = field(default=None, repr=False)

    @property
    def dims(self) -> tuple:
        return (self.bath_a.dim, self.bath_b.dim)

    def index_of(self, n: int, nu: int, m: int, mu: int) -> int:
        da, db = self.dims
        return ((n * db + nu) * da + m) * db + mu

    def row(self, n: int, nu: int, m: int, mu: int) -> Trajectory:
        da, db = self.dims
        if not (0 <= n < da and 0 <= m < da and 0 <= nu < db and 0 <= mu < db):
            raise IndexOutOfRange(f"trajectory ({n},{nu})->({m},{mu}) outside {da}x{db}")
        return self.rows[self.index_of(n, nu, m, mu)]

    def probs(self) -> np.ndarray:
        return np.array([r.prob for r in self.rows])

    def dq_matrix(self) -> np.ndarray:
        return np.array([r.dq for r in self.rows], dtype=float).reshape(len(self.rows), -1)

    def deltas(self) -> np.ndarray:
        return np.array([r.delta for r in self.rows])

    def sigmas(self) -> np.ndarray:
        """``sum_i dlam_i dq_i + delta`` per row."""
        return self.dq_matrix() @ self.deltas_lambda + self.deltas()


def require_nondegenerate(eig: HermEig, which: str) -> None:
    if eig.dim < 2:
        return
    spread = eig.values[-1] - eig.values[0]
    gap = eig.min_gap()
    if spread <= 0.0 or gap <= NONDEGENERACY_RTOL * spread:
        raise DegenerateSpectrum(
            f"exchange operator of bath {which} is degenerate "
            f"(min gap {gap:.3e}, spectral range {spread:.3e})"
        )


def charge_change(bath: Bath, i: int, n: int, m: int) -> float:
    """``<h_m|Q_i|h_m> - <h_n|Q_i|h_n>`` in the eigenbasis of the bath's exchange operator."""
    if not 0 <= i < bath.n_charges:
        raise IndexOutOfRange(f"charge index {i} outside 0..{bath.n_charges - 1}")
    if not (0 <= n < bath.dim and 0 <= m < bath.dim):
        raise IndexOutOfRange(f"levels ({n}, {m}) outside 0..{bath.dim - 1}")
    v = bath.gibbs.eig.vectors
    q = bath.charges[i]
    return float(np.real(v[:, m].conj() @ q @ v[:, m]) - np.real(v[:, n].conj() @ q @ v[:, n]))


def delta_residual(row: Trajectory, deltas_lambda) -> float:
    """Correction term as the residual of the conservation relation."""
    return (row.dhA + row.dhB) - float(np.dot(deltas_lambda, row.dq))


def _explicit_complex(frame: _EigenFrame, dlam, n, nu, m, mu) -> Optional[complex]:
    h = frame.hint
    denom = h[m, mu, n, nu]
    if abs(denom) <= EXPLICIT_RTOL * frame.hint_norm:
        return None
    da = frame.eig_a.dim
    total = 0j
    for lam, q in zip(dlam, frame.charges_a):
        first = sum(q[m, k] * h[k, mu, n, nu] for k in range(da) if k != m)
        second = sum(q[k, n] * h[m, mu, k, nu] for k in range(da) if k != n)
        total += lam * (first - second)
    return total / denom


def delta_explicit(table: TrajectoryTable, row: Trajectory, hint=None) -> Optional[float]:
    """Closed-form correction from interaction-Hamiltonian matrix elements.

    Returns ``None`` when ``|<m,mu|H_int|n,nu>| < 1e-12 ||H_int||_F``, where
    the formula divides by zero. The imaginary part (zero in exact
    arithmetic) is discarded; :class:`Trajectory` keeps it for auditing.
    """
    if hint is None:
        hint = table.interaction.hint
    if hint is None:
        raise MissingInteractionHamiltonian("interaction was given as a bare unitary")
    frame = table.frame
    if frame.hint is None or hint is not table.interaction.hint:
        frame = _frame(table.bath_a, table.bath_b, hint)
    val = _explicit_complex(frame, table.deltas_lambda, row.n, row.nu, row.m, row.mu)
    return None if val is None else float(val.real)


def reverse_trajectory(table: TrajectoryTable, row: Trajectory) -> Trajectory:
    """The row for ``(m, mu) -> (n, nu)``."""
    return table.row(row.m, row.mu, row.n, row.nu)


def _frame(bath_a: Bath, bath_b: Bath, hint) -> _EigenFrame:
    eig_a, eig_b = bath_a.gibbs.eig, bath_b.gibbs.eig
    va = eig_a.vectors
    charges = tuple(dagger(va) @ q @ va for q in bath_a.charges)
    h4, hnorm = None, 0.0
    if hint is not None:
        v = np.kron(va, eig_b.vectors)
        da, db = bath_a.dim, bath_b.dim
        hnorm = frob(np.asarray(hint))
        # the closed form is scale invariant; normalizing keeps tiny generators finite
        scale = 1.0 / hnorm if hnorm > np.finfo(float).tiny else 0.0
        h4 = (dagger(v) @ (scale * np.asarray(hint, dtype=complex)) @ v).reshape(da, db, da, db)
        hnorm = 1.0 if scale else 0.0
    return _EigenFrame(eig_a, eig_b, charges, h4, hnorm)


def enumerate_trajectories(
    bath_a: Bath,
    bath_b: Bath,
    interaction: Interaction,
    *,
    support_threshold: float = SUPPORT_THRESHOLD,
    certificate_tol: float = CERTIFICATE_TOL,
    explicit: bool = True,
) -> TrajectoryTable:
    """All ``dA^2 dB^2`` trajectories of one collision, sorted by ``(n, nu, m, mu)``.

    Raises
    ------
    CertificateFailure
        If the interaction does not commute with every total charge.
    DegenerateSpectrum
        If either exchange operator has a repeated eigenvalue.
    """
    dlam = affinity_shift(bath_a, bath_b)
    cert = interaction.certify(bath_a, bath_b, tol=certificate_tol)
    if not cert.passed:
        raise CertificateFailure(
            "interaction is not charge preserving: "
            + ", ".join(f"{l}={r:.3e}" for l, r in zip(cert.labels, cert.residuals)),
            cert,
        )
    ga, gb = bath_a.gibbs, bath_b.gibbs
    require_nondegenerate(ga.eig, "A")
    require_nondegenerate(gb.eig, "B")
    frame = _frame(bath_a, bath_b, interaction.hint if explicit else None)

    da, db = bath_a.dim, bath_b.dim
    ha, hb = ga.eig.values, gb.eig.values
    pa, pb = ga.populations, gb.populations
    v = np.kron(ga.eig.vectors, gb.eig.vectors)
    trans = np.abs(dagger(v) @ interaction.u @ v) ** 2  # [(m,mu), (n,nu)]
    qdiag = np.array([np.real(np.diag(q)) for q in frame.charges_a])

    rows = []
    for n in range(da):
        for nu in range(db):
            p0 = pa[n] * pb[nu]
            for m in range(da):
                for mu in range(db):
                    prob = float(p0 * trans[m * db + mu, n * db + nu])
                    dha = float(ha[m] - ha[n])
                    dhb = float(hb[mu] - hb[nu])
                    dq = tuple(float(x) for x in qdiag[:, m] - qdiag[:, n])
                    delta = (dha + dhb) - float(np.dot(dlam, dq))
                    flags = []
                    if prob < support_threshold:
                        flags.append("unsupported")
                    ex = ex_im = None
                    if frame.hint is None:
                        flags.append("no_hint")
                    else:
                        val = _explicit_complex(frame, dlam, n, nu, m, mu)
                        if val is None:
                            flags.append("inapplicable")
                        else:
                            ex, ex_im = float(val.real), float(val.imag)
                    rows.append(
                        Trajectory(n, nu, m, mu, prob, dha, dhb, dq, delta, ex, ex_im, tuple(flags))
                    )
    return TrajectoryTable(
        bath_a=bath_a,
        bath_b=bath_b,
        interaction=interaction,
        rows=tuple(rows),
        deltas_lambda=dlam,
        support_threshold=support_threshold,
        frame=frame,
    )
