"""Command-line interface: ``ginidex {index,estimate,fit,simulate,gof,heatmap}``.

Exit codes: 0 ok, 2 usage, 3 parse/numeric failure, 4 insufficient sample,
5 degenerate data.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .errors import (
    ConvergenceError,
    DegenerateDataError,
    DomainError,
    GinidexError,
    InsufficientSampleError,
    SizeGuardError,
)
from .estimators import Sample, estimate, heatmap_grid
from .fixtures import load_fixture
from .gamma_model import GammaParams, gamma_mle
from .inference import SimulationPlan, gof_test, run_simulation
from .population import (
    IndexSpec,
    gamma_distribution,
    gamma_index_value,
    index_value,
)

SCHEMA_VERSION = 1
DEFAULT_SEED = 8128
EXIT_USAGE, EXIT_NUMERIC, EXIT_INSUFFICIENT, EXIT_DEGENERATE = 2, 3, 4, 5


class DataParseError(GinidexError):
    pass


def _num(v: float) -> float:
    return float(f"{v:.10g}")


def read_dataset(path: str, column: str | None = None) -> Sample:
    """Read a one-column CSV (optional header; ``column`` picks a named field)."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if any(cell.strip() for cell in r)]
    if not rows:
        raise DataParseError(f"{path}: no data rows")

    def numeric(cell):
        try:
            float(cell)
            return True
        except ValueError:
            return False

    header = None
    if not all(numeric(c) for c in rows[0]):
        header = [c.strip() for c in rows[0]]
        rows = rows[1:]
    if column is not None:
        if header is None or column not in header:
            raise DataParseError(f"{path}: column {column!r} not found")
        idx = header.index(column)
    else:
        width = len(header) if header else len(rows[0]) if rows else 1
        if width != 1:
            raise DataParseError(f"{path}: {width} columns; choose one with --column")
        idx = 0
    values = []
    for lineno, row in enumerate(rows, start=2 if header else 1):
        try:
            v = float(row[idx])
        except (ValueError, IndexError):
            raise DataParseError(f"{path}: row {lineno} is not numeric: {row!r}") from None
        if not math.isfinite(v) or v < 0:
            raise DataParseError(f"{path}: row {lineno} must be a finite non-negative number")
        values.append(v)
    if not values:
        raise DataParseError(f"{path}: no data rows")
    return Sample(values)


def _load(args) -> Sample:
    if getattr(args, "fixture", None):
        sample = load_fixture(args.fixture)
    elif getattr(args, "data", None):
        sample = read_dataset(args.data, getattr(args, "column", None))
    else:
        raise DomainError("one of --data or --fixture is required")
    order = getattr(args, "sort", "none")
    if order == "asc":
        sample = Sample(np.sort(sample.values, kind="stable"))
    elif order == "desc":
        sample = Sample(np.sort(sample.values, kind="stable")[::-1])
    return sample


def _emit_json(payload: dict, out) -> None:
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    out.write(json.dumps(payload, indent=2) + "\n")


def _add_data_args(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--data", metavar="FILE", help="one-column CSV of observations")
    g.add_argument("--fixture", choices=["gdp2023"], help="bundled dataset")
    p.add_argument("--column", help="column name when the CSV has a header")


_REPR_NAMES = {"survival": "survival", "quantile": "quantile_covariance", "lorenz": "lorenz"}


def cmd_index(args, out):
    if args.data or args.fixture:
        sample = _load(args)
        fit = gamma_mle(sample.values)
        params = fit.params
        source = {"source": "fitted", "alpha": _num(params.alpha), "lambda": _num(params.lam)}
    else:
        if args.alpha is None or args.lam is None:
            raise DomainError("--dist gamma needs --alpha and --lambda")
        params = GammaParams(args.alpha, args.lam)
        source = {"source": "gamma", "alpha": params.alpha, "lambda": params.lam}
    spec = IndexSpec(args.m, 1, args.kind)
    model = gamma_distribution(params)
    payload = {"command": "index", "model": source, "m": args.m, "kind": args.kind}
    if args.repr == "all":
        paths = {name: index_value(model, spec, rep) for name, rep in _REPR_NAMES.items()}
        paths["gamma"] = gamma_index_value(params, spec)
        vals = [p.value for p in paths.values()]
        payload["paths"] = {
            k: {"value": _num(v.value), "representation": v.representation, "est_error": _num(v.est_error)}
            for k, v in paths.items()
        }
        payload["max_gap"] = _num(max(vals) - min(vals))
        first = paths["survival"]
    elif args.repr == "gamma":
        first = gamma_index_value(params, spec)
    else:
        first = index_value(model, spec, _REPR_NAMES[args.repr])
    payload.update(value=_num(first.value), representation=first.representation, est_error=_num(first.est_error))
    _emit_json(payload, out)


def run_estimate(args):
    sample = _load(args)
    spec = IndexSpec(args.m, args.i, args.kind)
    return estimate(sample, spec, args.algorithm)


def cmd_estimate(args, out):
    res = run_estimate(args)
    _emit_json(
        {
            "command": "estimate",
            "value": _num(res.value),
            "n": res.n,
            "m": res.spec.m,
            "i": res.spec.i,
            "kind": res.spec.kind,
            "algorithm": res.algorithm,
        },
        out,
    )


def cmd_fit(args, out):
    sample = _load(args)
    fit = gamma_mle(sample.values)
    _emit_json(
        {
            "command": "fit",
            "alpha": _num(fit.params.alpha),
            "lambda": _num(fit.params.lam),
            "log_likelihood": _num(fit.log_likelihood),
            "iterations": fit.iterations,
            "converged": fit.converged,
            "n": sample.n,
        },
        out,
    )


def _parse_sizes(text: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None
    if not sizes or any(n < 1 for n in sizes):
        raise argparse.ArgumentTypeError("sizes must be positive integers")
    return sizes


def cmd_simulate(args, out):
    plan = SimulationPlan(
        GammaParams(args.alpha, args.lam),
        IndexSpec(args.m, args.i, "lower"),
        args.sizes,
        args.reps,
        args.seed,
    )
    report = run_simulation(plan, threads=args.threads)
    out.write(report.to_csv())


def cmd_gof(args, out):
    sample = _load(args)
    if sample.n < 3:
        raise DegenerateDataError("goodness of fit needs at least three observations")
    method = {"plugin": "plugin_exact", "plugin_asymptotic": "plugin_asymptotic", "bootstrap": "parametric_bootstrap"}[
        args.method
    ]
    rep = gof_test(sample, method, boot=args.boot, seed=args.seed)
    fit = rep.fitted
    _emit_json(
        {
            "command": "gof",
            "method": rep.method,
            "n": rep.n,
            "statistic_ks": _num(rep.statistic_ks),
            "p_value_ks": _num(rep.p_value_ks),
            "statistic_cvm": _num(rep.statistic_cvm),
            "p_value_cvm": _num(rep.p_value_cvm),
            "bootstrap_replicates": rep.bootstrap_replicates,
            "fitted": {
                "alpha": _num(fit.params.alpha),
                "lambda": _num(fit.params.lam),
                "log_likelihood": _num(fit.log_likelihood),
                "converged": fit.converged,
            },
        },
        out,
    )


def cmd_heatmap(args, out):
    sample = _load(args)
    if args.m_max < 2:
        raise DomainError("--m-max must be at least 2")
    rows = heatmap_grid(sample, args.kind, args.m_max)
    out.write("m,i,value\n")
    for m, i, v in rows:
        out.write(f"{m},{i},{v:.6g}\n")


def _env_seed() -> int:
    raw = os.environ.get("GINIDEX_SEED")
    return int(raw) if raw else DEFAULT_SEED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ginidex", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ginidex {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    kinds = ["lower", "upper", "combined"]

    p = sub.add_parser("index", help="population index of a gamma model")
    p.add_argument("--dist", choices=["gamma"], default="gamma")
    p.add_argument("--alpha", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    _add_data_args(p, required=False)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--kind", choices=kinds, default="lower")
    p.add_argument("--repr", choices=["survival", "quantile", "lorenz", "gamma", "all"], default="survival")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("estimate", help="sample estimate from a data file")
    _add_data_args(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--i", type=int, default=1)
    p.add_argument("--kind", choices=kinds, default="lower")
    p.add_argument("--algorithm", choices=["weighted", "brute"], default="weighted")
    p.add_argument("--sort", choices=["none", "asc", "desc"], default="none")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("fit", help="gamma maximum-likelihood fit")
    _add_data_args(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="Monte Carlo bias/MSE study (CSV)")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--i", type=int, default=3)
    p.add_argument("--sizes", type=_parse_sizes, default=(10, 30, 50, 100, 200))
    p.add_argument("--reps", type=int, default=500)
    p.add_argument("--seed", type=int, default=None, help="defaults to $GINIDEX_SEED or 8128")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gof", help="KS and CvM tests of a gamma fit")
    _add_data_args(p)
    p.add_argument("--method", choices=["plugin", "plugin_asymptotic", "bootstrap"], default="plugin")
    p.add_argument("--boot", type=int, default=2000)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_gof)

    p = sub.add_parser("heatmap", help="estimates over the (m, i) grid (CSV)")
    _add_data_args(p)
    p.add_argument("--kind", choices=kinds, default="lower")
    p.add_argument("--m-max", dest="m_max", type=int, required=True)
    p.add_argument("--sort", choices=["none", "asc", "desc"], default="none")
    p.set_defaults(func=cmd_heatmap)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "seed", "absent") is None:
        args.seed = _env_seed()
    try:
        args.func(args, out)
    except InsufficientSampleError as exc:
        print(f"ginidex: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT
    except DegenerateDataError as exc:
        print(f"ginidex: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (DataParseError, ConvergenceError, FloatingPointError) as exc:
        print(f"ginidex: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DomainError, SizeGuardError) as exc:
        print(f"ginidex: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"ginidex: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
