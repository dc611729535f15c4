"""JSON model configuration.

Layout::

    {
      "baths": {
        "A": {"dim": 2,
              "charges": [{"label": "z", "matrix": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]}, ...],
              "affinities": [0.5, 0.8]},
        "B": {...}
      },
      "interaction": {"type": "generalized_swap", "alpha": 1.0}
                   | {"type": "hamiltonian", "matrix": ..., "tau": 1.0}
                   | {"type": "unitary", "matrix": ...},
      "options": {"quantization_eps": 1e-9, "support_threshold": 1e-14,
                  "tolerances": {"detailed_ft": 1e-8, ...}}
    }

Matrix entries are ``[re, im]`` pairs; a bare number is read as real.
Every failure raises :class:`ConfigError` carrying the path of the offending
entry, e.g. ``baths.A.charges[0].matrix``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .collision import SUPPORT_THRESHOLD
from .commutant import Interaction, generalized_swap, swap_generator
from .errors import ConfigError
from .gibbs import Bath
from .matlin import is_hermitian, unitary_exp
from .qubit_example import ModelTemplate, QubitModelParams
from .statistics import QUANTIZATION_EPS, Tolerances

INTERACTION_TYPES = ("generalized_swap", "hamiltonian", "unitary")


@dataclass(frozen=True)
class InteractionSpec:
    type: str
    alpha: Optional[float] = None
    tau: Optional[float] = None
    matrix: Optional[np.ndarray] = None

    @property
    def parameter(self) -> float:
        """Swap angle or interaction time; NaN for a fixed unitary."""
        if self.type == "generalized_swap":
            return self.alpha
        if self.type == "hamiltonian":
            return self.tau
        return math.nan

    def build(self) -> Interaction:
        if self.type == "generalized_swap":
            return Interaction(generalized_swap(self.alpha), swap_generator(self.alpha), 1.0)
        if self.type == "hamiltonian":
            return Interaction(unitary_exp(self.matrix, self.tau), self.matrix, self.tau)
        return Interaction(self.matrix)


@dataclass(frozen=True, eq=False)
class ModelConfig:
    bath_a: Bath
    bath_b: Bath
    interaction: Optional[InteractionSpec]
    eps: float = QUANTIZATION_EPS
    support_threshold: float = SUPPORT_THRESHOLD
    tolerances: Tolerances = field(default_factory=Tolerances)

    def template(self) -> ModelTemplate:
        if self.bath_a.n_charges != 2:
            raise ConfigError("baths.A.charges", "sweeps need exactly two charges")
        if self.interaction is None:
            raise ConfigError("interaction", "missing")
        return ModelTemplate(
            self.bath_a.charges,
            self.bath_b.charges,
            self.bath_a.labels,
            kind=self.interaction.type,
            matrix=self.interaction.matrix,
        )

    def base_params(self) -> dict:
        a, b = self.bath_a.affinities, self.bath_b.affinities
        out = {"betaA": a[0], "chiA": a[1], "betaB": b[0], "chiB": b[1]}
        if self.interaction is not None and self.interaction.type != "unitary":
            out["alpha"] = self.interaction.parameter
        return out

    def params(self) -> QubitModelParams:
        return QubitModelParams(**self.base_params())


def _get(obj, key, path):
    if not isinstance(obj, dict):
        raise ConfigError(path, "expected an object")
    if key not in obj:
        raise ConfigError(f"{path}.{key}" if path else key, "missing")
    return obj[key]


def _number(x, path) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(path, f"expected a number, got {type(x).__name__}")
    if not math.isfinite(x):
        raise ConfigError(path, "must be finite")
    return float(x)


def _matrix(raw, dim: int, path: str) -> np.ndarray:
    if not isinstance(raw, list) or len(raw) != dim:
        raise ConfigError(path, f"expected {dim} rows")
    m = np.zeros((dim, dim), dtype=complex)
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != dim:
            raise ConfigError(f"{path}[{i}]", f"expected {dim} entries")
        for j, z in enumerate(row):
            p = f"{path}[{i}][{j}]"
            if isinstance(z, list):
                if len(z) != 2:
                    raise ConfigError(p, "complex entries are [re, im] pairs")
                m[i, j] = complex(_number(z[0], p), _number(z[1], p))
            else:
                m[i, j] = _number(z, p)
    return m


def _bath(raw, side: str) -> Bath:
    path = f"baths.{side}"
    dim = _get(raw, "dim", path)
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise ConfigError(f"{path}.dim", "expected a positive integer")
    charges = _get(raw, "charges", path)
    if not isinstance(charges, list) or not charges:
        raise ConfigError(f"{path}.charges", "expected a non-empty list")
    mats, labels = [], []
    for i, ch in enumerate(charges):
        cpath = f"{path}.charges[{i}]"
        label = _get(ch, "label", cpath)
        if not isinstance(label, str) or not label:
            raise ConfigError(f"{cpath}.label", "expected a non-empty string")
        parity = ch.get("time_reversal", "even")
        if parity != "even":
            raise ConfigError(f"{cpath}.time_reversal", "only time-reversal-even charges are supported")
        m = _matrix(_get(ch, "matrix", cpath), dim, f"{cpath}.matrix")
        if not is_hermitian(m):
            raise ConfigError(f"{cpath}.matrix", "charge matrix is not Hermitian")
        mats.append(m)
        labels.append(label)
    if len(set(labels)) != len(labels):
        raise ConfigError(f"{path}.charges", f"duplicate labels {labels}")
    aff = _get(raw, "affinities", path)
    if not isinstance(aff, list) or len(aff) != len(mats):
        raise ConfigError(f"{path}.affinities", f"expected a list of {len(mats)} numbers")
    aff = [_number(x, f"{path}.affinities[{i}]") for i, x in enumerate(aff)]
    return Bath(tuple(mats), tuple(aff), tuple(labels))


def _interaction(raw, dim: int) -> InteractionSpec:
    kind = _get(raw, "type", "interaction")
    if kind not in INTERACTION_TYPES:
        raise ConfigError("interaction.type", f"expected one of {', '.join(INTERACTION_TYPES)}")
    if kind == "generalized_swap":
        if dim != 4:
            raise ConfigError("interaction.type", "generalized_swap needs two qubits")
        return InteractionSpec(kind, alpha=_number(_get(raw, "alpha", "interaction"), "interaction.alpha"))
    m = _matrix(_get(raw, "matrix", "interaction"), dim, "interaction.matrix")
    if kind == "hamiltonian":
        if not is_hermitian(m):
            raise ConfigError("interaction.matrix", "interaction Hamiltonian is not Hermitian")
        return InteractionSpec(kind, tau=_number(_get(raw, "tau", "interaction"), "interaction.tau"), matrix=m)
    return InteractionSpec(kind, matrix=m)


def _options(raw) -> dict:
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError("options", "expected an object")
    out = {}
    if "quantization_eps" in raw:
        eps = _number(raw["quantization_eps"], "options.quantization_eps")
        if eps <= 0:
            raise ConfigError("options.quantization_eps", "must be positive")
        out["eps"] = eps
    if "support_threshold" in raw:
        thr = _number(raw["support_threshold"], "options.support_threshold")
        if thr < 0:
            raise ConfigError("options.support_threshold", "must be nonnegative")
        out["support_threshold"] = thr
    tol = raw.get("tolerances", {})
    if not isinstance(tol, dict):
        raise ConfigError("options.tolerances", "expected an object")
    known = {f.name for f in fields(Tolerances)}
    for key in tol:
        if key not in known:
            raise ConfigError(f"options.tolerances.{key}", f"unknown tolerance; known: {', '.join(sorted(known))}")
    if tol:
        out["tolerances"] = Tolerances(**{k: _number(v, f"options.tolerances.{k}") for k, v in tol.items()})
    return out


def parse_config(raw: dict, require_interaction: bool = True) -> ModelConfig:
    baths = _get(raw, "baths", "")
    bath_a = _bath(_get(baths, "A", "baths"), "A")
    bath_b = _bath(_get(baths, "B", "baths"), "B")
    if bath_a.n_charges != bath_b.n_charges:
        raise ConfigError("baths.B.charges", f"expected {bath_a.n_charges} charges to match bath A")
    for i, (la, lb) in enumerate(zip(bath_a.labels, bath_b.labels)):
        if la != lb:
            raise ConfigError(f"baths.B.charges[{i}].label", f"expected {la!r} to match bath A")
    inter = None
    if "interaction" in raw or require_interaction:
        inter = _interaction(_get(raw, "interaction", ""), bath_a.dim * bath_b.dim)
    return ModelConfig(bath_a, bath_b, inter, **_options(raw.get("options")))


def load_config(path, require_interaction: bool = True) -> ModelConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("", f"cannot read {path}: {exc.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("", "top level must be an object")
    return parse_config(raw, require_interaction)


def bath_to_dict(bath: Bath) -> dict:
    from .render import matrix_to_pairs

    return {
        "dim": bath.dim,
        "charges": [{"label": l, "matrix": matrix_to_pairs(q)} for l, q in zip(bath.labels, bath.charges)],
        "affinities": list(bath.affinities),
    }


def qubit_config(params: QubitModelParams) -> dict:
    """Config dict of the sigma_z / sigma_x example at one parameter point."""
    from .matlin import SIGMA_X, SIGMA_Z

    def side(beta, chi):
        return bath_to_dict(Bath((SIGMA_Z, SIGMA_X), (beta, chi), ("z", "x")))

    return {
        "baths": {"A": side(params.betaA, params.chiA), "B": side(params.betaB, params.chiB)},
        "interaction": {"type": "generalized_swap", "alpha": params.alpha},
    }
