"""Current statistics and the universal relations they obey.

Trajectories are grouped by their charge changes and correction term into a
joint distribution ``P(dQ_1, ..., dQ_N; delta)``. On top of it we evaluate
the detailed and integral exchange fluctuation theorems, the second law with
and without the correction, the thermodynamic uncertainty relation, and the
exponential bound on negative entropy-production tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .collision import TrajectoryTable
from .errors import SingularState
from .matlin import dagger, herm_eig, kron

QUANTIZATION_EPS = 1e-9
SUPPORT = 1e-14
DEGENERATE_FLOOR = 1e-12
DEFAULT_ZETAS = (0.0, 0.5, 1.0, 2.0, 4.0)


@dataclass(frozen=True)
class Tolerances:
    detailed_ft: float = 1e-8
    integral_ft: float = 1e-10
    second_law: float = 1e-10
    tur: float = 1e-9
    tail_bound: float = 1e-12
    entropy_identity: float = 1e-10
    delta_consistency: float = 1e-8
    delta_imag: float = 1e-9


@dataclass
class FTReport:
    relation: str
    passed: bool
    residual: float
    tolerance: float
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "relation": self.relation,
            "pass": bool(self.passed),
            "residual": self.residual,
            "tolerance": self.tolerance,
            "details": self.details,
        }


@dataclass(frozen=True, eq=False)
class CurrentDistribution:
    """Joint distribution of charge changes and correction term.

    Keys are integer tuples ``k`` standing for the values ``k * eps``; the
    last component is the correction. ``values[key]`` holds the
    probability-weighted mean of the unrounded member values, used wherever a
    relation needs more precision than ``eps``.
    """

    probs: dict
    values: dict
    deltas_lambda: np.ndarray
    eps: float = QUANTIZATION_EPS

    @property
    def n_charges(self) -> int:
        return len(self.deltas_lambda)

    def keys(self) -> list:
        return sorted(self.probs)

    def prob(self, key) -> float:
        return self.probs.get(tuple(key), 0.0)

    def total(self) -> float:
        return math.fsum(self.probs.values())

    def _arrays(self):
        keys = self.keys()
        p = np.array([self.probs[k] for k in keys])
        v = np.array([self.values[k] for k in keys]).reshape(len(keys), self.n_charges + 1)
        return p, v

    def sigma_of(self, key) -> float:
        v = self.values[tuple(key)]
        return float(np.dot(self.deltas_lambda, v[:-1]) + v[-1])


@dataclass(frozen=True)
class Averages:
    avg_dq: np.ndarray
    avg_delta: float
    sigma_avg: float

    @property
    def uncorrected(self) -> float:
        """``sum_i dlam_i <dQ_i>`` without the correction."""
        return self.sigma_avg - self.avg_delta


def _quantize(x: float, eps: float) -> int:
    return int(round(x / eps))


def build_distribution(table: TrajectoryTable, eps: float = QUANTIZATION_EPS) -> CurrentDistribution:
    """Group trajectories with equal ``(dq, delta)`` (to ``eps``) and sum their probabilities.

    A row is left out only when it and its reverse are both below the table's
    support threshold; such pairs carry negligible weight in every relation,
    including the integral theorem where each term equals the reverse
    probability.
    """
    thr = table.support_threshold
    mass: dict = {}
    acc: dict = {}
    for row in table.rows:
        if row.prob < thr:
            back = table.row(row.m, row.mu, row.n, row.nu)
            if back.prob < thr:
                continue
        vals = np.array(row.dq + (row.delta,))
        key = tuple(_quantize(x, eps) for x in vals)
        mass[key] = mass.get(key, 0.0) + row.prob
        acc[key] = acc.get(key, 0.0) + row.prob * vals
    values = {}
    for key, w in mass.items():
        values[key] = acc[key] / w if w > 0 else np.array(key, dtype=float) * eps
    return CurrentDistribution(mass, values, np.array(table.deltas_lambda, dtype=float), eps)


def detailed_ft_report(dist: CurrentDistribution, tol: float = 1e-8, support: float = SUPPORT) -> FTReport:
    """Check ``P(v) / P(-v) = exp(sum_i dlam_i dQ_i + delta)`` on every mutually supported pair."""
    worst = 0.0
    pairs = 0
    one_sided = []
    for key in dist.keys():
        p = dist.probs[key]
        if p <= support:
            continue
        neg = tuple(-k for k in key)
        q = dist.prob(neg)
        if q <= support:
            one_sided.append(list(key))
            continue
        if neg < key:
            continue
        pairs += 1
        res = abs(math.log(p / q) - dist.sigma_of(key))
        worst = max(worst, res)
    return FTReport(
        "detailed_ft",
        worst < tol,
        worst,
        tol,
        {"pairs_checked": pairs, "one_sided_keys": one_sided, "eps": dist.eps},
    )


def integral_ft(dist: CurrentDistribution) -> float:
    """``<exp(-sum_i dlam_i dQ_i - delta)>``; equals 1 for every admissible model."""
    p, v = dist._arrays()
    sig = v[:, :-1] @ dist.deltas_lambda + v[:, -1]
    return math.fsum(p * np.exp(-sig))


def naive_integral_ft(dist: CurrentDistribution) -> float:
    """``<exp(-sum_i dlam_i dQ_i)>`` with the correction dropped from the exponent."""
    p, v = dist._arrays()
    return math.fsum(p * np.exp(-(v[:, :-1] @ dist.deltas_lambda)))


def integral_ft_from_detailed(dist: CurrentDistribution, support: float = SUPPORT) -> float:
    """Integral theorem rebuilt as ``sum_v P(-v)`` over supported keys."""
    return math.fsum(dist.prob(tuple(-k for k in key)) for key in dist.keys() if dist.probs[key] > support)


def integral_ft_report(dist: CurrentDistribution, tol: float = 1e-10) -> FTReport:
    val = integral_ft(dist)
    naive = naive_integral_ft(dist)
    return FTReport("integral_ft", abs(val - 1.0) <= tol, abs(val - 1.0), tol, {"value": val, "naive_value": naive})


def averages(source: Union[TrajectoryTable, CurrentDistribution]) -> Averages:
    """Mean charge changes, mean correction and mean entropy production."""
    if isinstance(source, CurrentDistribution):
        p, v = source._arrays()
        avg_dq = p @ v[:, :-1]
        avg_delta = float(p @ v[:, -1])
        dlam = source.deltas_lambda
    else:
        p = source.probs()
        avg_dq = p @ source.dq_matrix()
        avg_dh = math.fsum(p * np.array([r.dhA + r.dhB for r in source.rows]))
        dlam = np.asarray(source.deltas_lambda, dtype=float)
        avg_delta = avg_dh - float(dlam @ avg_dq)
    return Averages(np.asarray(avg_dq, dtype=float), avg_delta, float(dlam @ avg_dq) + avg_delta)


def evolved_state(table: TrajectoryTable) -> tuple[np.ndarray, np.ndarray]:
    """``(rho0, U rho0 U^dag)`` for the collision described by ``table``."""
    rho0 = kron(table.bath_a.gibbs.rho, table.bath_b.gibbs.rho)
    u = table.interaction.u
    rho1 = u @ rho0 @ dagger(u)
    return rho0, 0.5 * (rho1 + dagger(rho1))


def operator_currents(table: TrajectoryTable) -> np.ndarray:
    """``tr[(Q_i^A (x) 1)(U rho0 U^dag - rho0)]`` for each charge.

    Differs from the trajectory average when ``Q_i^A`` has coherences in the
    exchange-operator eigenbasis; reported as a diagnostic only.
    """
    rho0, rho1 = evolved_state(table)
    eye_b = np.eye(table.bath_b.dim)
    diff = rho1 - rho0
    return np.array([np.real(np.trace(kron(q, eye_b) @ diff)) for q in table.bath_a.charges])


def entropy_production_operator(table: TrajectoryTable) -> float:
    """``tr[(U rho0 U^dag - rho0)(H_A (x) 1 + 1 (x) H_B)]``, i.e. ``S(U rho0 U^dag || rho0)``."""
    rho0, rho1 = evolved_state(table)
    ha, hb = table.bath_a.gibbs.hop, table.bath_b.gibbs.hop
    htot = kron(ha, np.eye(table.bath_b.dim)) + kron(np.eye(table.bath_a.dim), hb)
    return float(np.real(np.trace((rho1 - rho0) @ htot)))


def second_law_report(avg: Averages, tol: float = 1e-10) -> FTReport:
    corrected = avg.sigma_avg
    uncorrected = avg.uncorrected
    return FTReport(
        "second_law",
        corrected >= -tol,
        max(0.0, -corrected),
        tol,
        {
            "corrected": corrected,
            "uncorrected": uncorrected,
            "avg_delta": avg.avg_delta,
            "apparent_violation": uncorrected < -tol,
        },
    )


def tur_report(
    dist: CurrentDistribution, j: int, tol: float = 1e-9, sigma_avg: float | None = None
) -> FTReport:
    """Relative variance of ``dQ_j`` against ``2 / (exp(<sigma>) - 1)``.

    When the mean current or the mean entropy production is below ``1e-12``
    the bound is infinite or the ratio undefined; the report is flagged
    degenerate and passes vacuously.
    """
    p, v = dist._arrays()
    x = v[:, j]
    mean = float(p @ x)
    var = float(p @ (x - mean) ** 2)
    if sigma_avg is None:
        sigma_avg = averages(dist).sigma_avg
    details = {"charge_index": j, "mean": mean, "variance": var, "sigma_avg": sigma_avg}
    if abs(mean) < DEGENERATE_FLOOR or sigma_avg < DEGENERATE_FLOOR:
        details.update(degenerate=True, ratio=None, bound=None, margin=None)
        return FTReport(f"tur[{j}]", True, 0.0, tol, details)
    ratio = var / mean**2
    bound = 2.0 / math.expm1(sigma_avg)
    margin = ratio - bound
    details.update(degenerate=False, ratio=ratio, bound=bound, margin=margin)
    return FTReport(f"tur[{j}]", margin >= -tol, max(0.0, -margin), tol, details)


def tail_bound_report(table: TrajectoryTable, zetas: Iterable[float] = DEFAULT_ZETAS, tol: float = 1e-12) -> FTReport:
    """``P(sigma < -zeta) <= exp(-zeta)`` for each ``zeta >= 0``."""
    sig = table.sigmas()
    p = table.probs()
    points = []
    worst = 0.0
    for z in zetas:
        if z < 0:
            raise ValueError(f"zeta must be nonnegative, got {z}")
        lhs = math.fsum(p[sig < -z])
        bound = math.exp(-z)
        worst = max(worst, lhs - bound)
        points.append({"zeta": float(z), "probability": lhs, "bound": bound})
    return FTReport("tail_bound", worst <= tol, max(0.0, worst), tol, {"points": points})


def contrast_divergence(gid: str, rho, sigma) -> float:
    """``sum_ij rho_i g(sigma_j / rho_i) |<sigma_j|rho_i>|^2`` for ``g`` in {identity, neglog}.

    ``identity`` always gives ``tr(sigma) = 1``; ``neglog`` is the quantum
    relative entropy ``S(rho || sigma)``.
    """
    if gid not in ("identity", "neglog"):
        raise ValueError(f"unknown contrast function {gid!r}")
    er, es = herm_eig(rho), herm_eig(sigma)
    if np.any(es.values < 1e-14):
        raise SingularState(f"sigma has eigenvalue {es.values.min():.3e} below 1e-14")
    overlap = np.abs(dagger(es.vectors) @ er.vectors) ** 2  # [j, i]
    terms = []
    for i, ri in enumerate(er.values):
        for j, sj in enumerate(es.values):
            w = overlap[j, i]
            if gid == "identity":
                terms.append((ri * (sj / ri) if ri > 0 else sj) * w)
            elif ri > 0:
                terms.append(ri * -math.log(sj / ri) * w)
    return math.fsum(terms)


def trajectory_contrast(gid: str, table: TrajectoryTable) -> float:
    """Trajectory-side value ``sum_gamma P(gamma) g(exp(-(dhA + dhB)))``."""
    terms = []
    for r in table.rows:
        s = r.dhA + r.dhB
        terms.append(r.prob * (math.exp(-s) if gid == "identity" else s))
    return math.fsum(terms)


def delta_consistency_report(table: TrajectoryTable, tol: float = 1e-8, imag_tol: float = 1e-9) -> FTReport:
    """Residual-form correction versus the closed form, on rows where the latter applies."""
    worst = worst_imag = worst_antisym = 0.0
    applicable = 0
    for r in table.rows:
        if r.delta_explicit is None:
            continue
        applicable += 1
        worst = max(worst, abs(r.delta - r.delta_explicit))
        worst_imag = max(worst_imag, abs(r.delta_explicit_imag))
        back = table.row(r.m, r.mu, r.n, r.nu)
        if back.delta_explicit is not None:
            worst_antisym = max(worst_antisym, abs(back.delta_explicit + r.delta_explicit))
    ok = worst <= tol and worst_imag < imag_tol and worst_antisym <= imag_tol
    return FTReport(
        "delta_consistency",
        ok,
        worst,
        tol,
        {
            "applicable_rows": applicable,
            "max_imag": worst_imag,
            "max_antisymmetry": worst_antisym,
        },
    )


def verify_all(
    table: TrajectoryTable,
    eps: float = QUANTIZATION_EPS,
    tolerances: Tolerances = Tolerances(),
    zetas: Sequence[float] = DEFAULT_ZETAS,
) -> list:
    """Every relation report for one model, in a fixed order."""
    dist = build_distribution(table, eps)
    avg = averages(table)
    reports = [
        detailed_ft_report(dist, tolerances.detailed_ft),
        integral_ft_report(dist, tolerances.integral_ft),
        second_law_report(avg, tolerances.second_law),
    ]
    for j in range(dist.n_charges):
        reports.append(tur_report(dist, j, tolerances.tur, sigma_avg=avg.sigma_avg))
    reports.append(tail_bound_report(table, zetas, tolerances.tail_bound))

    s_op = entropy_production_operator(table)
    s_contrast = contrast_divergence("neglog", *reversed(evolved_state(table)))
    gap = max(abs(avg.sigma_avg - s_op), abs(avg.sigma_avg - s_contrast))
    reports.append(
        FTReport(
            "entropy_identity",
            gap <= tolerances.entropy_identity,
            gap,
            tolerances.entropy_identity,
            {"sigma_avg": avg.sigma_avg, "relative_entropy_trace": s_op, "relative_entropy_contrast": s_contrast},
        )
    )
    if table.interaction.hint is not None and table.frame.hint is not None:
        reports.append(delta_consistency_report(table, tolerances.delta_consistency, tolerances.delta_imag))
    op = operator_currents(table)
    reports.append(
        FTReport(
            "operator_current_gap",
            True,
            0.0,
            0.0,
            {
                "diagnostic": True,
                "trajectory_average": [float(x) for x in avg.avg_dq],
                "operator_trace": [float(x) for x in op],
                "gap": [float(abs(a - b)) for a, b in zip(avg.avg_dq, op)],
            },
        )
    )
    return reports
