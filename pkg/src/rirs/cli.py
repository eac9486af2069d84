"""Command-line front end: ``rirs test``, ``rirs estimate`` and ``rirs simulate``.

Exit codes: 0 success, 2 bad flags, 3 unreadable or invalid data,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import graph_io
from .core import default_m, test_rank, validate_m
from .errors import InvalidArgument, NumericalFailure, ParseError
from .models import ModelSpec
from .montecarlo import ExperimentSpec, render_report, run_experiment
from .rank_select import DEFAULT_K_MAX, estimate_k
from .spectra import SymMatrix

EXIT_FLAGS, EXIT_DATA, EXIT_NUMERIC = 2, 3, 4
M_WINDOW_EPS = 0.1
MODEL_NAMES = {"sbm": "sbm", "dcmm": "dcmm", "lowrank": "lowrank_uniform"}


class DataError(Exception):
    pass


class FlagError(Exception):
    """A flag problem only detectable after the input has been read."""


def _m_value(text: str) -> str | float:
    if text == "sqrt":
        return text
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'sqrt' or a number >= 1, got {text!r}") from None
    if not v >= 1:
        raise argparse.ArgumentTypeError(f"m must be >= 1, got {text!r}")
    return v


def _k0_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _common(p: argparse.ArgumentParser):
    p.add_argument("--alpha", type=float, default=0.05, help="significance level (default 0.05)")
    p.add_argument("--m", type=_m_value, default="sqrt", help="'sqrt' for sqrt(n) or a number >= 1")
    p.add_argument("--seed", type=int, help="master seed; required whenever a mask or generator runs")
    p.add_argument("--out", help="output path (stdout when omitted)")
    p.add_argument("--out-format", choices=("json", "csv"), help="default: from --out extension, else json")


def _data_flags(p: argparse.ArgumentParser):
    p.add_argument("--input", required=True, help="edge list or Matrix Market file")
    p.add_argument("--format", choices=("edgelist", "mtx"), help="default: from the file extension")
    p.add_argument("--base", type=int, default=1, choices=(0, 1), help="edge-list index base")
    p.add_argument("--transform", choices=("none", "sum", "double"), default="none",
                   help="none: drop directions; sum: X + X^T; double: [[0, X], [X^T, 0]]")
    p.add_argument("--selfloops", choices=("auto", "true", "false"), default="auto")
    p.add_argument("--no-lcc", dest="lcc", action="store_false",
                   help="skip restriction to the largest connected component")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rirs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="test H0: rank = k0 on a data file")
    _data_flags(t)
    t.add_argument("--k0", type=int, required=True)
    _common(t)

    e = sub.add_parser("estimate", help="estimate the rank by sequential testing")
    _data_flags(e)
    e.add_argument("--k-max", type=int, default=DEFAULT_K_MAX)
    _common(e)

    s = sub.add_parser("simulate", help="Monte Carlo size / power / accuracy experiment")
    s.add_argument("--model", choices=tuple(MODEL_NAMES), default="sbm")
    s.add_argument("--n", type=int, default=1000)
    s.add_argument("--k", type=int, default=2, help="true rank / number of communities")
    s.add_argument("--rho", type=float, default=0.1)
    s.add_argument("--r", type=float, default=0.5)
    s.add_argument("--x", type=float, default=0.2)
    s.add_argument("--n0", type=int)
    s.add_argument("--theta-lo", type=float, default=0.5)
    s.add_argument("--theta-hi", type=float, default=1.0)
    s.add_argument("--n1", type=int)
    s.add_argument("--selfloops", choices=("true", "false"), default="false")
    s.add_argument("--mode", choices=("test", "estimate"), default="test")
    s.add_argument("--k0", type=_k0_list, help="comma-separated null ranks (test mode)")
    s.add_argument("--k-max", type=int, default=6)
    s.add_argument("--reps", type=int, default=200)
    s.add_argument("--variants", default="auto", help="comma-separated: auto, subsampled, diagonal, fullsum_diagnostic")
    s.add_argument("--workers", type=int, default=1)
    _common(s)
    return parser


def _validate(parser, args):
    if not 0 < args.alpha < 1:
        parser.error(f"--alpha must lie in (0, 1), got {args.alpha}")
    if args.command == "test" and args.k0 < 1:
        parser.error(f"--k0 must be >= 1, got {args.k0}")
    if args.command in ("estimate", "simulate") and args.k_max < 1:
        parser.error(f"--k-max must be >= 1, got {args.k_max}")
    if args.command in ("test", "estimate"):
        if args.seed is None and args.selfloops == "false":
            parser.error("--seed is required (the subsampled statistic draws a random mask)")
    if args.command == "simulate":
        if args.seed is None:
            parser.error("--seed is required for simulate")
        if args.reps < 1:
            parser.error(f"--reps must be >= 1, got {args.reps}")
        if args.mode == "test" and not args.k0:
            parser.error("--k0 is required in test mode")
        if args.workers < 1:
            parser.error(f"--workers must be >= 1, got {args.workers}")
    if args.seed is not None and args.seed < 0:
        parser.error(f"--seed must be non-negative, got {args.seed}")


def _out_format(args) -> str:
    if args.out_format:
        return args.out_format
    if args.out and Path(args.out).suffix.lower() == ".csv":
        return "csv"
    return "json"


def load_matrix(args) -> SymMatrix:
    """Read ``--input`` and apply transform, self-loop handling and LCC."""
    fmt = args.format or ("mtx" if Path(args.input).suffix.lower() == ".mtx" else "edgelist")
    try:
        if fmt == "mtx":
            raw = graph_io.read_matrix_market(args.input)
        else:
            raw = graph_io.read_edgelist(args.input, base=args.base, directed=True)
    except OSError as exc:
        raise DataError(f"--input: cannot read {args.input}: {exc}") from exc
    except ParseError as exc:
        raise DataError(f"--input {args.input}: {exc}") from exc

    if args.transform == "sum":
        X = graph_io.symmetrize_sum(raw)
    elif args.transform == "double":
        X = graph_io.bipartite_double(raw)
    else:
        X = raw.to_symmatrix() if isinstance(raw, graph_io.EdgeList) else raw

    if args.selfloops == "false":
        X = graph_io.strip_selfloops(X)
    elif args.selfloops == "true":
        X = SymMatrix(X.entries, has_selfloops=True)
    if args.lcc:
        X, _ = graph_io.largest_connected_component(X)
    return X


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _warn_m(X: SymMatrix, m):
    n = X.n
    a = np.asarray(X)
    density = float(np.count_nonzero(a) - np.count_nonzero(np.diagonal(a))) / (n * (n - 1))
    theta = min(1.0, max(density, 1.0 / (n * n)))
    for msg in validate_m(n, default_m(n) if m is None else m, theta, M_WINDOW_EPS):
        print(f"warning: {msg}", file=sys.stderr)


def _run(args) -> int:
    m = None if args.m == "sqrt" else args.m
    if args.command == "simulate":
        model = ModelSpec(
            family=MODEL_NAMES[args.model], n=args.n, K=args.k, r=args.r, rho=args.rho, x=args.x,
            n0=args.n0, theta_lo=args.theta_lo, theta_hi=args.theta_hi, n1=args.n1,
            selfloops=args.selfloops == "true",
        )
        spec = ExperimentSpec(
            model=model, k0_list=tuple(args.k0 or ()), alpha=args.alpha, reps=args.reps,
            m_rule="sqrt_n" if m is None else m, master_seed=args.seed, mode=args.mode,
            k_max=args.k_max, variants=tuple(v for v in args.variants.split(",") if v),
        )
        report = run_experiment(spec, workers=args.workers)
        _emit(args, render_report(report, _out_format(args)))
        if spec.mode == "estimate":
            agg = report.aggregates["estimate"]
            print(f"correct K proportion: {agg['correct_rate']:.3f} over {agg['reps']} replicates", file=sys.stderr)
        else:
            for key, agg in report.aggregates["tests"].items():
                print(f"{key}: rejection rate {agg['rejection_rate']:.3f} ({agg['rejections']}/{agg['valid']})",
                      file=sys.stderr)
        return 0

    try:
        X = load_matrix(args)
    except InvalidArgument as exc:
        raise DataError(f"--input {args.input}: {exc}") from exc
    print(f"prepared matrix: n={X.n}, self-loops={X.has_selfloops}", file=sys.stderr)
    if not X.has_selfloops:
        if args.seed is None:
            raise FlagError("--seed is required: the input has no self-loops, so a random mask is drawn")
        _warn_m(X, m)

    if args.command == "test":
        if args.k0 >= X.n:
            raise DataError(f"--k0={args.k0} must be below the prepared matrix size n={X.n}")
        out = test_rank(X, args.k0, args.alpha, m, args.seed)
        _emit(args, json.dumps(out.to_dict(), indent=2) + "\n")
        verdict = "reject" if out.reject else "accept"
        print(f"K0={out.k0}: {out.variant} statistic {out.statistic:.4f}, p={out.p_value:.4g} -> {verdict}",
              file=sys.stderr)
        return 0

    if args.k_max >= X.n:
        raise DataError(f"--k-max={args.k_max} must be below the prepared matrix size n={X.n}")
    est = estimate_k(X, args.alpha, args.k_max, m, args.seed)
    doc = est.to_dict()
    doc["transform"] = args.transform
    if args.transform == "double":
        doc["k_hat_raw"] = est.k_hat
        doc["k_hat"] = None if est.k_hat is None else est.k_hat / 2
        doc["note"] = "doubling [[0, X], [X^T, 0]] doubles the rank; k_hat is k_hat_raw / 2"
    _emit(args, json.dumps(doc, indent=2) + "\n")
    for t in est.trail:
        print(f"K0={t.k0}: statistic {t.statistic:.4f}, p={t.p_value:.4g} -> {'reject' if t.reject else 'accept'}",
              file=sys.stderr)
    if est.k_hat is None:
        print(f"every K0 <= {args.k_max} rejected", file=sys.stderr)
    elif args.transform == "double":
        print(f"estimated rank {doc['k_hat']:g} (raw {est.k_hat} on the doubled matrix, halved)", file=sys.stderr)
    else:
        print(f"estimated rank {est.k_hat}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _validate(parser, args)
    except SystemExit as exc:
        return int(exc.code or 0)
    print("config: " + json.dumps(vars(args), sort_keys=True), file=sys.stderr)
    try:
        return _run(args)
    except FlagError as exc:
        parser.print_usage(sys.stderr)
        print(f"rirs: error: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InvalidArgument as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FLAGS


if __name__ == "__main__":
    sys.exit(main())
