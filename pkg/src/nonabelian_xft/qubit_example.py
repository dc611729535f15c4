"""Spin-1/2 model with charges sigma_z and sigma_x, and parameter sweeps over it.

Each bath unit is a qubit in the state ``exp(-beta sigma_z - chi sigma_x) / Z``;
the only admissible collisions are generalized swaps. A sweep evaluates
every relation at each grid node and records the averaged currents, the
integral theorems with and without the correction, and whether the currents
flow against their affinity biases.

Sweeps run over any two-charge model through :class:`ModelTemplate`;
"beta" and "chi" always refer to the affinities of the first and second
charge.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .collision import enumerate_trajectories
from .commutant import Interaction, generalized_swap, swap_generator, unitary_from_interaction
from .errors import CertificateFailure, DegenerateSpectrum, NotUnitary, XFTError
from .gibbs import Bath
from .matlin import IDENTITY_2, SIGMA_X, SIGMA_Z
from .statistics import (
    DEFAULT_ZETAS,
    QUANTIZATION_EPS,
    Tolerances,
    averages,
    build_distribution,
    detailed_ft_report,
    integral_ft,
    naive_integral_ft,
    tail_bound_report,
    tur_report,
)

INVERSION_FLOOR = 1e-12
SPECTRAL_FLOOR = 1e-9
PARAM_NAMES = ("betaA", "chiA", "betaB", "chiB", "alpha")
GRID_VARS = PARAM_NAMES + ("dbeta", "dchi")
RELATION_FLAGS = ("integral_ft_fail", "detailed_ft_fail", "second_law_fail", "tur_fail", "tail_bound_fail")


@dataclass(frozen=True)
class QubitModelParams:
    betaA: float
    chiA: float
    betaB: float
    chiB: float
    alpha: float = 1.0

    @property
    def dbeta(self) -> float:
        return self.betaA - self.betaB

    @property
    def dchi(self) -> float:
        return self.chiA - self.chiB


@dataclass(frozen=True, eq=False)
class ModelTemplate:
    """Two-charge model with free affinities and a one-parameter interaction.

    ``kind`` is ``"generalized_swap"`` (parameter = swap angle),
    ``"hamiltonian"`` (parameter = interaction time for ``matrix``) or
    ``"unitary"`` (``matrix`` used as is; no parameter).
    """

    charges_a: tuple
    charges_b: tuple
    labels: tuple
    kind: str = "generalized_swap"
    matrix: Optional[np.ndarray] = None
    spectral_floor: float = SPECTRAL_FLOOR

    def build(self, params: QubitModelParams) -> tuple[Bath, Bath, Interaction]:
        bath_a = Bath(self.charges_a, (params.betaA, params.chiA), self.labels)
        bath_b = Bath(self.charges_b, (params.betaB, params.chiB), self.labels)
        if self.kind == "generalized_swap":
            inter = Interaction(generalized_swap(params.alpha), swap_generator(params.alpha), 1.0)
        elif self.kind == "hamiltonian":
            inter = unitary_from_interaction(self.matrix, params.alpha)
        else:
            inter = Interaction(np.asarray(self.matrix, dtype=complex))
        return bath_a, bath_b, inter


QUBIT_TEMPLATE = ModelTemplate((SIGMA_Z, SIGMA_X), (SIGMA_Z, SIGMA_X), ("z", "x"))

# sigma_z and the excitation projector (1 + sigma_z)/2: commuting, both conserved by swaps
COMMUTING_TEMPLATE = ModelTemplate(
    (SIGMA_Z, (IDENTITY_2 + SIGMA_Z) / 2), (SIGMA_Z, (IDENTITY_2 + SIGMA_Z) / 2), ("z", "n")
)


@dataclass(frozen=True)
class SweepPoint:
    params: QubitModelParams
    avg_dq_z: float = math.nan
    avg_dq_x: float = math.nan
    avg_delta: float = math.nan
    sigma_avg: float = math.nan
    integral_ft: float = math.nan
    naive_ft: float = math.nan
    uncorrected_second_law: float = math.nan
    inversion_z: bool = False
    inversion_x: bool = False
    double_inversion: bool = False
    tur_min_margin: Optional[float] = None  # None: every TUR check was degenerate
    detailed_ft_residual: float = math.nan
    tail_bound_excess: float = math.nan
    flags: tuple = field(default=())

    @property
    def failed(self) -> bool:
        return any(f in RELATION_FLAGS for f in self.flags)


def build_qubit_model(params: QubitModelParams, template: ModelTemplate = QUBIT_TEMPLATE):
    """Baths and interaction for one parameter point.

    Raises
    ------
    DegenerateSpectrum
        If ``beta^2 + chi^2`` vanishes on either bath (for the default
        sigma_z/sigma_x template).
    """
    if template is QUBIT_TEMPLATE:
        for side, b, c in (("A", params.betaA, params.chiA), ("B", params.betaB, params.chiB)):
            if math.hypot(b, c) <= template.spectral_floor:
                raise DegenerateSpectrum(f"bath {side}: beta = chi = 0 gives a degenerate Gibbs operator")
    bath_a, bath_b, inter = template.build(params)
    cert = inter.certify(bath_a, bath_b)
    if not cert.passed:
        raise CertificateFailure("interaction is not charge preserving", cert)
    return bath_a, bath_b, inter


def detect_inversions(point: SweepPoint) -> SweepPoint:
    """Flag currents that flow against their affinity difference.

    A current is inverted when ``<dQ> * dlambda < -1e-12``. With no bias
    (``dlambda == 0``) nothing can be inverted.
    """
    db, dc = point.params.dbeta, point.params.dchi
    inv_z = db != 0 and point.avg_dq_z * db < -INVERSION_FLOOR
    inv_x = dc != 0 and point.avg_dq_x * dc < -INVERSION_FLOOR
    return replace(point, inversion_z=bool(inv_z), inversion_x=bool(inv_x), double_inversion=bool(inv_z and inv_x))


def evaluate_point(
    params: QubitModelParams,
    template: ModelTemplate = QUBIT_TEMPLATE,
    eps: float = QUANTIZATION_EPS,
    tolerances: Tolerances = Tolerances(),
    zetas: Sequence[float] = DEFAULT_ZETAS,
) -> SweepPoint:
    try:
        bath_a, bath_b, inter = build_qubit_model(params, template)
        table = enumerate_trajectories(bath_a, bath_b, inter, explicit=False)
    except DegenerateSpectrum:
        return SweepPoint(params, flags=("degenerate_spectrum",))
    except (CertificateFailure, NotUnitary):
        return SweepPoint(params, flags=("not_charge_preserving",))

    dist = build_distribution(table, eps)
    avg = averages(table)
    ift = integral_ft(dist)
    detailed = detailed_ft_report(dist, tolerances.detailed_ft)
    tail = tail_bound_report(table, zetas, tolerances.tail_bound)
    margins = []
    tur_ok = True
    for j in range(2):
        rep = tur_report(dist, j, tolerances.tur, sigma_avg=avg.sigma_avg)
        tur_ok &= rep.passed
        if not rep.details["degenerate"]:
            margins.append(rep.details["margin"])

    flags = []
    if abs(ift - 1.0) > tolerances.integral_ft:
        flags.append("integral_ft_fail")
    if not detailed.passed:
        flags.append("detailed_ft_fail")
    if avg.sigma_avg < -tolerances.second_law:
        flags.append("second_law_fail")
    if not tur_ok:
        flags.append("tur_fail")
    if not tail.passed:
        flags.append("tail_bound_fail")
    if avg.uncorrected < -tolerances.second_law:
        flags.append("apparent_violation")

    point = SweepPoint(
        params,
        avg_dq_z=float(avg.avg_dq[0]),
        avg_dq_x=float(avg.avg_dq[1]),
        avg_delta=avg.avg_delta,
        sigma_avg=avg.sigma_avg,
        integral_ft=ift,
        naive_ft=naive_integral_ft(dist),
        uncorrected_second_law=avg.uncorrected,
        tur_min_margin=min(margins) if margins else None,
        detailed_ft_residual=detailed.residual,
        tail_bound_excess=tail.residual,
        flags=tuple(flags),
    )
    point = detect_inversions(point)
    if point.double_inversion:
        point = replace(point, flags=point.flags + ("double_inversion",))
    return point


class GridError(XFTError, ValueError):
    pass


@dataclass(frozen=True)
class GridAxis:
    var: str
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.var not in GRID_VARS:
            raise GridError(f"unknown grid variable {self.var!r}; expected one of {', '.join(GRID_VARS)}")
        if self.count < 1:
            raise GridError(f"grid count must be positive, got {self.count}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise GridError("grid bounds must be finite")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)

    @classmethod
    def parse(cls, text: str) -> "GridAxis":
        """Parse ``VAR:START:STOP:COUNT``."""
        parts = text.split(":")
        if len(parts) != 4:
            raise GridError(f"grid must look like VAR:START:STOP:COUNT, got {text!r}")
        try:
            return cls(parts[0], float(parts[1]), float(parts[2]), int(parts[3]))
        except ValueError as exc:
            if isinstance(exc, GridError):
                raise
            raise GridError(f"bad grid {text!r}: {exc}") from None


@dataclass(frozen=True)
class Grid:
    """Cartesian product of axes (row-major) over fixed parameter values."""

    axes: tuple
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        names = [a.var for a in self.axes]
        if len(set(names)) != len(names):
            raise GridError(f"variable swept twice: {names}")
        for key in self.fixed:
            if key not in GRID_VARS:
                raise GridError(f"unknown parameter {key!r}")
        assigned = set(names) | set(self.fixed)
        for rel, target in (("dbeta", "betaA"), ("dchi", "chiA")):
            if rel in assigned and target in names:
                raise GridError(f"{rel} and {target} cannot both be set")

    def points(self) -> list:
        out = []
        for combo in itertools.product(*(a.values() for a in self.axes)):
            values = dict(self.fixed)
            for axis, v in zip(self.axes, combo):
                values[axis.var] = float(v)
            out.append(resolve_params(values))
        return out


def resolve_params(values: dict) -> QubitModelParams:
    vals = dict(values)
    if "dbeta" in vals:
        vals["betaA"] = vals.get("betaB", 0.0) + vals.pop("dbeta")
    if "dchi" in vals:
        vals["chiA"] = vals.get("chiB", 0.0) + vals.pop("dchi")
    missing = [k for k in PARAM_NAMES[:4] if k not in vals]
    if missing:
        raise GridError(f"missing parameter values: {', '.join(missing)}")
    return QubitModelParams(**{k: float(vals[k]) for k in PARAM_NAMES if k in vals})


def _evaluate(args):
    return evaluate_point(*args)


def sweep_fig2(
    grid: Grid,
    template: ModelTemplate = QUBIT_TEMPLATE,
    eps: float = QUANTIZATION_EPS,
    tolerances: Tolerances = Tolerances(),
    workers: int = 1,
) -> list:
    """One :class:`SweepPoint` per grid node, in grid order.

    Points whose model cannot be built are flagged rather than aborting the
    sweep.
    """
    jobs = [(p, template, eps, tolerances) for p in grid.points()]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_evaluate, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return [_evaluate(j) for j in jobs]


# Swept variable is the coherence-affinity difference. chi_B = 1.8 rather than
# a smaller value: below |chi_B| ~ 1.5 the hot-A row shows no double inversion.
FIG2_CHI_B = 1.8


def fig2_grid(beta_a: float, beta_b: float, count: int = 201, chi_b: float = FIG2_CHI_B, alpha: float = 1.0) -> Grid:
    return Grid((GridAxis("dchi", -2.0, 2.0, count),), {"betaA": beta_a, "betaB": beta_b, "chiB": chi_b, "alpha": alpha})


FIG2_EQUAL_BETA = fig2_grid(0.5, 0.5)
FIG2_HOT_A = fig2_grid(0.3, 0.8)
