"""Command-line front end.

Exit codes: 0 pass, 1 validation failure, 2 relation violation,
3 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .collision import enumerate_trajectories, require_nondegenerate
from .commutant import solve_allowed_interactions
from .config import ModelConfig, load_config
from .errors import CertificateFailure, ConfigError, DegenerateSpectrum, DimensionMismatch, NotUnitary, XFTError
from .gibbs import commutation_report
from .qubit_example import GRID_VARS, Grid, GridAxis, GridError, sweep_fig2
from .render import (
    SWEEP_COLUMNS,
    json_safe,
    matrix_to_pairs,
    render_svg,
    to_csv_text,
    write_sweep_csv,
    write_trajectory_csv,
)
from .statistics import verify_all

EXIT_OK, EXIT_INVALID, EXIT_RELATION, EXIT_USAGE = 0, 1, 2, 3
DEFAULT_GRID = "dchi:-2:2:201"
DEFAULT_SVG_COLUMNS = "integral_ft,naive_ft"
NUMERIC_COLUMNS = tuple(c for c in SWEEP_COLUMNS[:12])


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(obj, out: Optional[str]) -> None:
    text = json.dumps(json_safe(obj), indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _fail(kind: str, message: str, **extra) -> dict:
    return {"status": "fail", "error": kind, "message": message, **extra}


def _validation_report(cfg: ModelConfig) -> tuple[int, dict]:
    """Certificate, commutation and nondegeneracy checks, in that order."""
    inter = cfg.interaction.build()
    report = {
        "commutation": {
            side: [{"i": i, "j": j, "norm": n} for i, j, n in commutation_report(b).pairs]
            for side, b in (("A", cfg.bath_a), ("B", cfg.bath_b))
        }
    }
    try:
        cert = inter.certify(cfg.bath_a, cfg.bath_b)
    except (NotUnitary, DimensionMismatch) as exc:
        return EXIT_INVALID, _fail(type(exc).__name__, str(exc), **report)
    report["certificate"] = cert.to_dict()
    if not cert.passed:
        return EXIT_INVALID, _fail("CertificateFailure", "interaction is not charge preserving", **report)
    for side, b in (("A", cfg.bath_a), ("B", cfg.bath_b)):
        try:
            require_nondegenerate(b.gibbs.eig, side)
        except DegenerateSpectrum as exc:
            return EXIT_INVALID, _fail("DegenerateSpectrum", str(exc), **report)
    report["spectra"] = {"A": cfg.bath_a.gibbs.eig.values, "B": cfg.bath_b.gibbs.eig.values}
    return EXIT_OK, {"status": "pass", **report}


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    code, report = _validation_report(cfg)
    _emit(report, args.out)
    return code


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    if args.dump_trajectories and not args.out:
        raise UsageError("--dump-trajectories writes next to --out; give --out as well")
    code, report = _validation_report(cfg)
    if code != EXIT_OK:
        _emit(report, args.out)
        return code
    table = enumerate_trajectories(
        cfg.bath_a, cfg.bath_b, cfg.interaction.build(), support_threshold=cfg.support_threshold
    )
    eps = args.eps if args.eps is not None else cfg.eps
    reports = verify_all(table, eps=eps, tolerances=cfg.tolerances)
    failed = [r.relation for r in reports if not r.passed]
    _emit(
        {
            "status": "fail" if failed else "pass",
            "failed": failed,
            "quantization_eps": eps,
            "reports": [r.to_dict() for r in reports],
        },
        args.out,
    )
    if args.dump_trajectories:
        out = Path(args.out)
        out.with_name(out.stem + ".trajectories.csv").write_text(to_csv_text(write_trajectory_csv, table))
    return EXIT_RELATION if failed else EXIT_OK


def _parse_sets(items: Sequence[str]) -> dict:
    fixed = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise GridError(f"--set expects KEY=VALUE, got {item!r}")
        if key not in GRID_VARS:
            raise GridError(f"unknown parameter {key!r}; expected one of {', '.join(GRID_VARS)}")
        try:
            fixed[key] = float(value)
        except ValueError:
            raise GridError(f"--set {key}: not a number: {value!r}") from None
    return fixed


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    template = cfg.template()
    axis = GridAxis.parse(args.grid)
    fixed = cfg.base_params()
    # a relative variable replaces the absolute one it is defined against
    for rel, target in (("dbeta", "betaA"), ("dchi", "chiA")):
        if axis.var == rel:
            fixed.pop(target)
    fixed.update(_parse_sets(args.set))
    fixed.pop(axis.var, None)
    if template.kind == "unitary" and "alpha" in {axis.var, *fixed}:
        raise GridError("a fixed-unitary interaction has no parameter to set")
    grid = Grid((axis,), fixed)
    cols = [c.strip() for c in args.columns.split(",") if c.strip()]
    if args.svg and (not cols or any(c not in NUMERIC_COLUMNS for c in cols)):
        raise UsageError(f"--columns must name numeric sweep columns: {', '.join(NUMERIC_COLUMNS)}")
    eps = args.eps if args.eps is not None else cfg.eps
    points = sweep_fig2(grid, template, eps=eps, tolerances=cfg.tolerances, workers=args.workers)

    csv_text = to_csv_text(write_sweep_csv, points)
    if args.out:
        Path(args.out).write_text(csv_text)
    else:
        sys.stdout.write(csv_text)
    if args.svg:
        xs = axis.values()
        series = {c: [_column(p, c) for p in points] for c in cols}
        Path(args.svg).write_text(render_svg(xs, series, axis.var, title=f"sweep over {axis.var}"))
    return EXIT_RELATION if any(p.failed for p in points) else EXIT_OK


def _column(point, name: str) -> float:
    if hasattr(point.params, name):
        return getattr(point.params, name)
    return getattr(point, name)


def cmd_commutant(args) -> int:
    cfg = load_config(args.config, require_interaction=False)
    basis = solve_allowed_interactions(cfg.bath_a, cfg.bath_b)
    _emit(
        {
            "status": "pass",
            "dimension": len(basis),
            "labels": list(cfg.bath_a.labels),
            "basis": [matrix_to_pairs(x) for x in basis],
        },
        args.out,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nxft", description="Exchange fluctuation theorems with non-commuting charges.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", required=True, metavar="PATH", help="JSON model configuration")
        sp.add_argument("--out", metavar="PATH", help="output file (default: standard output)")

    sp = sub.add_parser("validate", help="certify the interaction and check the exchange spectra")
    common(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("verify", help="check every fluctuation relation for one model")
    common(sp)
    sp.add_argument("--eps", type=float, help="quantization step for current values")
    sp.add_argument(
        "--dump-trajectories", action="store_true", help="also write OUT stem + .trajectories.csv"
    )
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("sweep", help="scan one parameter of a two-charge model")
    common(sp)
    sp.add_argument("--grid", default=DEFAULT_GRID, metavar="VAR:START:STOP:COUNT")
    sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="fix a parameter")
    sp.add_argument("--eps", type=float)
    sp.add_argument("--svg", metavar="PATH", help="line chart of --columns against the swept variable")
    sp.add_argument("--columns", default=DEFAULT_SVG_COLUMNS, help="comma-separated sweep columns to plot")
    sp.add_argument("--workers", type=int, default=1, help="worker processes")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("commutant", help="basis of all charge-preserving interaction Hamiltonians")
    common(sp)
    sp.set_defaults(func=cmd_commutant)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "eps", None) is not None and not args.eps > 0:
            raise UsageError("--eps must be positive")
        return args.func(args)
    except UsageError as exc:
        print(f"nxft: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"nxft: config error at {exc.path or '<root>'}: {exc.message}", file=sys.stderr)
        return EXIT_USAGE
    except GridError as exc:
        print(f"nxft: grid error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CertificateFailure, DegenerateSpectrum, NotUnitary, DimensionMismatch) as exc:
        print(f"nxft: validation failed: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except XFTError as exc:
        print(f"nxft: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"nxft: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # keep the exit-code contract total
        print(f"nxft: unexpected {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
