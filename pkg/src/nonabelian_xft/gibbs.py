"""Baths as charge sets with affinities, and their generalized Gibbs states."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch
from .matlin import HermEig, comm_norm, dagger, herm_eig, require_hermitian

ABELIAN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Bath:
    """One reservoir: ``N`` Hermitian charges on a ``dim``-level unit.

    ``labels[i]`` names charge ``i``; ``affinities[i]`` is its conjugate
    parameter in the Gibbs exponent.
    """

    charges: tuple
    affinities: tuple
    labels: tuple = ()

    def __post_init__(self):
        charges = tuple(require_hermitian(q, f"charge {i}") for i, q in enumerate(self.charges))
        if not charges:
            raise ValueError("a bath needs at least one charge")
        dims = {q.shape[0] for q in charges}
        if len(dims) != 1:
            raise DimensionMismatch(f"charges have differing dimensions {sorted(dims)}")
        aff = tuple(float(x) for x in self.affinities)
        if len(aff) != len(charges):
            raise ValueError(f"{len(charges)} charges but {len(aff)} affinities")
        if not all(np.isfinite(aff)):
            raise ValueError("affinities must be finite")
        labels = tuple(self.labels) or tuple(f"Q{i + 1}" for i in range(len(charges)))
        if len(labels) != len(charges):
            raise ValueError(f"{len(charges)} charges but {len(labels)} labels")
        object.__setattr__(self, "charges", charges)
        object.__setattr__(self, "affinities", aff)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.charges[0].shape[0]

    @property
    def n_charges(self) -> int:
        return len(self.charges)

    def with_affinities(self, affinities: Sequence[float]) -> "Bath":
        return Bath(self.charges, tuple(affinities), self.labels)

    @cached_property
    def gibbs(self) -> "GibbsState":
        return gibbs_state(self)


@dataclass(frozen=True, eq=False)
class GibbsState:
    hop: np.ndarray
    eig: HermEig
    Z: float
    rho: np.ndarray

    @property
    def populations(self) -> np.ndarray:
        """Eigenvalues of ``rho`` in the order of ``eig.values``."""
        w = np.exp(-(self.eig.values - self.eig.values[0]))
        return w / w.sum()


@dataclass(frozen=True)
class CommutationReport:
    pairs: list = field(default_factory=list)

    @property
    def abelian(self) -> bool:
        return all(norm < ABELIAN_TOL for _, _, norm in self.pairs)


def exchange_hamiltonian(bath: Bath) -> np.ndarray:
    """The operator ``sum_i lambda_i Q_i`` that generates the Gibbs state."""
    hop = np.zeros((bath.dim, bath.dim), dtype=complex)
    for lam, q in zip(bath.affinities, bath.charges):
        hop = hop + lam * q
    return hop


def gibbs_state(bath: Bath) -> GibbsState:
    hop = exchange_hamiltonian(bath)
    eig = herm_eig(hop)
    h0 = eig.values[0]
    w = np.exp(-(eig.values - h0))
    z = float(np.exp(-h0) * w.sum())
    p = w / w.sum()
    rho = (eig.vectors * p) @ dagger(eig.vectors)
    rho = 0.5 * (rho + dagger(rho))
    return GibbsState(hop=hop, eig=eig, Z=z, rho=rho)


def commutation_report(bath: Bath) -> CommutationReport:
    pairs = [
        (i, j, comm_norm(bath.charges[i], bath.charges[j]))
        for i, j in combinations(range(bath.n_charges), 2)
    ]
    return CommutationReport(pairs)


def affinity_shift(bath_a: Bath, bath_b: Bath) -> np.ndarray:
    """``delta lambda_i = lambda_i^A - lambda_i^B``."""
    check_compatible(bath_a, bath_b)
    return np.array(bath_a.affinities) - np.array(bath_b.affinities)


def check_compatible(bath_a: Bath, bath_b: Bath) -> None:
    """Both baths must carry the same charges, by label and in order."""
    if bath_a.n_charges != bath_b.n_charges:
        raise DimensionMismatch(
            f"bath A has {bath_a.n_charges} charges, bath B has {bath_b.n_charges}"
        )
    if bath_a.labels != bath_b.labels:
        raise ValueError(f"charge labels differ: {bath_a.labels} vs {bath_b.labels}")
