"""Command-line front end.

Every subcommand writes one JSON report (sorted keys, no timestamps) to
``--out`` or stdout.  Exit codes: 0 success, 1 usage error, 2 data error,
3 numerical failure.  Failures are also recorded in the report's ``errors``.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .changepoint import detect
from .core import NetworkKind, ParamField, edge_domain
from .diagnostics import permutation_test
from .errors import ArnetError, DataError, NumericalError
from .experiments import community_experiment, table1
from .io import dumps, parse_series
from .mle import confidence_intervals, count_matrix, estimate_all
from .process import simulate
from .sbm import bic, cluster_ar, cluster_mean, group_mle

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3
RANDOMISED = {"simulate", "diagnose", "cluster", "bic", "changepoint", "replicate"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _clean(obj):
    """Convert numpy scalars and arrays to plain JSON values; NaN and inf become null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, NetworkKind):
        return obj.value
    return obj


def render(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


# ---- subcommands -------------------------------------------------------


def cmd_simulate(args) -> dict:
    if args.p is None or args.n is None or args.alpha is None or args.beta is None:
        raise UsageError("simulate needs --p, --n, --alpha and --beta")
    d = edge_domain(args.kind, args.p)
    field = ParamField.homogeneous(d, args.alpha, args.beta)
    init = args.init if args.init == "stationary" else float(args.init)
    series = simulate(field, args.n, init, args.seed)
    text = dumps(series)
    result = {"p": series.p, "n": series.n, "kind": series.kind.value,
              "edges_per_snapshot": series.snapshots[:, d.rows, d.cols].sum(axis=1).tolist()}
    if args.series_out:
        Path(args.series_out).write_bytes(text.encode("ascii"))
        result["series_file"] = str(args.series_out)
    else:
        result["series"] = text
    return result


def _load(args):
    if not args.input:
        raise UsageError(f"{args.command} needs --input")
    return parse_series(args.input).check()


def cmd_estimate(args) -> dict:
    series = _load(args)
    est = estimate_all(series, args.kappa or 0.0)
    counts = count_matrix(series)
    a_lo, a_hi, b_lo, b_hi = confidence_intervals(est, series.n, args.level)
    edges = []
    for e, (i, j) in enumerate(est.domain.edges):
        edges.append({
            "i": i, "j": j,
            "alpha": est.alpha[e], "beta": est.beta[e], "status": int(est.status[e]),
            "counts": {"n01": counts[e, 0], "n00": counts[e, 1], "n10": counts[e, 2], "n11": counts[e, 3]},
            "alpha_ci": [a_lo[e], a_hi[e]], "beta_ci": [b_lo[e], b_hi[e]],
        })
    return {"p": series.p, "n": series.n, "kind": series.kind.value, "level": args.level, "edges": edges,
            "undefined_edges": int(np.count_nonzero(est.status))}


def cmd_diagnose(args) -> dict:
    series = _load(args)
    return permutation_test(series, args.perms, args.seed).to_dict()


def cmd_cluster(args) -> dict:
    series = _load(args)
    if args.q is None:
        raise UsageError("cluster needs --q")
    rng = np.random.default_rng(args.seed)
    if args.method == "mean":
        res = cluster_mean(series, args.q, args.restarts, rng)
    else:
        res = cluster_ar(series, args.q, args.kappa, args.restarts, rng)
    fit = group_mle(series, res.membership)
    return {"method": args.method, "labels": res.membership.labels, "sizes": res.membership.sizes,
            "eigenvalues": res.basis.eigenvalues, "eigengap": res.basis.eigengap, "inertia": res.inertia,
            "smoothed": res.smoothed, "kappa": res.kappa, "fit": fit.to_dict()}


def cmd_bic(args) -> dict:
    series = _load(args)
    qmax = args.q if args.q is not None else min(12, series.p)
    return bic(series, range(1, qmax + 1), args.kappa, args.restarts, args.seed).to_dict()


def cmd_changepoint(args) -> dict:
    series = _load(args)
    if args.q is None:
        raise UsageError("changepoint needs --q")
    report = detect(series, args.q, args.n0, args.stride, args.kappa, args.restarts, args.seed, args.perms or 0)
    return report.to_dict()


def cmd_replicate(args) -> dict:
    if args.table is None:
        raise UsageError("replicate needs --table")
    n_values = tuple(args.n) if args.n else None
    if args.table == "t1":
        rows = table1(args.p or 30, n_values or (50, 200), args.reps or 200, args.seed, args.level)
        columns = ["n", "p", "mse_alpha", "coverage_alpha", "mse_beta", "coverage_beta"]
    else:
        rows = community_experiment(args.q or 2, args.p or 100, n_values or ((20, 100) if args.table == "t2" else (100,)),
                                    args.reps or 20, args.seed, args.restarts)
        if args.table == "t2":
            columns = ["n", "p", "q", "nmi_ar", "ari_ar", "nmi_mean", "ari_mean"]
        else:
            columns = ["n", "p", "q", "mse_theta_ar", "mse_eta_ar", "mse_theta_mean", "mse_eta_mean"]
        rows = [{k: r[k] for k in ["reps", *columns]} for r in rows]
    if args.csv:
        buf = _io.StringIO()
        w = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        Path(args.csv).write_text(buf.getvalue())
    return {"table": args.table, "rows": rows}


COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "diagnose": cmd_diagnose,
    "cluster": cmd_cluster,
    "bic": cmd_bic,
    "changepoint": cmd_changepoint,
    "replicate": cmd_replicate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="arnet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_text, *flags):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--out", help="report path (default: stdout)")
        if name in RANDOMISED:
            sp.add_argument("--seed", type=int, help="required; every random draw derives from it")
        if name not in ("simulate", "replicate"):
            sp.add_argument("--input", help="series file")
        for flag in flags:
            flag(sp)
        return sp

    def f_p(sp): sp.add_argument("--p", type=int)
    def f_q(sp): sp.add_argument("--q", type=int)
    def f_kappa(sp): sp.add_argument("--kappa", type=float, default=None, help="add-kappa smoothing")
    def f_restarts(sp): sp.add_argument("--restarts", type=int, default=50)
    def f_perms(sp): sp.add_argument("--perms", type=int, default=200)
    def f_level(sp): sp.add_argument("--level", type=float, default=0.95)

    sim = add("simulate", "simulate a homogeneous AR(1) network and write a series file", f_p)
    sim.add_argument("--n", type=int)
    sim.add_argument("--alpha", type=float)
    sim.add_argument("--beta", type=float)
    sim.add_argument("--kind", default=NetworkKind.UNDIRECTED_NOSELF.value,
                     choices=[k.value for k in NetworkKind])
    sim.add_argument("--init", default="stationary", help="'stationary' or an edge probability")
    sim.add_argument("--series-out", help="write the series file here instead of embedding it")
    add("estimate", "per-edge estimates and confidence intervals", f_kappa, f_level)
    add("diagnose", "permutation test of the AR(1) fit", f_perms)
    cl = add("cluster", "spectral community detection", f_q, f_kappa, f_restarts)
    cl.add_argument("--method", choices=["ar", "mean"], default="ar")
    add("bic", "BIC over q = 1..--q", f_q, f_kappa, f_restarts)
    cp = add("changepoint", "single change-point estimate", f_q, f_kappa, f_restarts)
    cp.add_argument("--n0", type=int)
    cp.add_argument("--stride", type=int, default=1)
    cp.add_argument("--perms", type=int, default=0, help="also run the permutation test with this many draws")
    rep = add("replicate", "simulation tables at a chosen scale", f_p, f_q, f_restarts, f_level)
    rep.add_argument("--table", choices=["t1", "t2", "t3"])
    rep.add_argument("--n", type=int, nargs="+")
    rep.add_argument("--reps", type=int)
    rep.add_argument("--csv", help="also write the table as CSV")
    return parser


def _parameters(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "command")}


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_bytes(text.encode("utf-8"))
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    report = {"version": __version__, "command": None, "parameters": {}, "result": None, "errors": []}
    # find --out first so that usage errors are still written where asked
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--out")
    out = pre.parse_known_args(argv)[0].out
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("arnet: a subcommand is required")
        out = args.out
        report["command"] = args.command
        report["parameters"] = _parameters(args)
        if args.command in RANDOMISED and args.seed is None:
            raise UsageError(f"arnet {args.command}: --seed is required")
        report["seed"] = getattr(args, "seed", None)
        report["result"] = COMMANDS[args.command](args)
        code = EXIT_OK
    except UsageError as exc:
        code = EXIT_USAGE
        report["errors"].append({"kind": "usage", "type": "UsageError", "message": str(exc)})
        print(str(exc), file=sys.stderr)
    except NumericalError as exc:
        code = EXIT_NUMERICAL
        report["errors"].append({"kind": "numerical", "type": type(exc).__name__, "message": str(exc)})
        print(f"numerical failure: {exc}", file=sys.stderr)
    except (DataError, ArnetError, OSError) as exc:
        code = EXIT_DATA
        report["errors"].append({"kind": "data", "type": type(exc).__name__, "message": str(exc)})
        print(f"data error: {exc}", file=sys.stderr)
    report["exit_code"] = code
    _emit(render(report), out)
    return code


if __name__ == "__main__":
    sys.exit(main())
