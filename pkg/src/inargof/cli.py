"""Command-line interface: ``inargof {test,estimate,simulate,summary,experiment,heatmap}``.

Exit codes: 0 success (including a rejected null), 2 invalid input or flags,
3 estimation failure or a degenerate series.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path


from . import __version__
from .bootstrap import gof_test
from .core import DegenerateSeries, InarError, sample_acf, sample_moments, sample_pacf
from .dgp import DEFAULT_BURN_IN, RngStream, parse_dgp, simulate
from .estimate import DegenerateInput, NonConvergence, ZeroLikelihood, fit_semiparametric
from .gof import StatConfig
from .harness import DEFAULT_M, PRESETS, preset, rescale, run_experiments, specs_from_json, write_rows
from .io import atomic_write, read_counts, write_counts
from .pgf import weighted_squared_difference

EXIT_OK, EXIT_INPUT, EXIT_FIT = 0, 2, 3
FIT_ERRORS = (DegenerateSeries, DegenerateInput, ZeroLikelihood, NonConvergence)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _nonneg_float(text: str) -> float:
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {text}")
    return v


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        atomic_write(out, text)


def _json(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _floats(values) -> list[float]:
    return [float(v) for v in values]


def _default_threads() -> int:
    return os.cpu_count() or 1


def cmd_test(args) -> int:
    series = read_counts(args.input)
    s = args.stat_order or args.order
    method = args.method or ("closed" if float(args.weight).is_integer() else "quad")
    cfg = StatConfig(s=s, a=args.weight, method=method)
    res = gof_test(series, args.order, cfg, args.bootstrap, args.burnin, RngStream(args.seed),
                   threads=args.threads)
    model = res.fit.model
    doc = {
        "n": series.n,
        "p": args.order,
        "s": s,
        "a": args.weight,
        "B": args.bootstrap,
        "statistic": res.statistic,
        "p_value": res.p_value,
        "alphas": _floats(model.alphas),
        "innovation_pmf": _floats(model.innovations.masses),
        "converged": bool(res.fit.converged),
        "excluded_replicates": res.excluded,
        "seed": args.seed,
    }
    if res.warning:
        print(f"warning: {res.excluded} of {args.bootstrap} bootstrap refits degenerated", file=sys.stderr)
    if args.json:
        _emit(_json(doc), args.out)
    else:
        verdict = "reject" if res.p_value <= args.level else "do not reject"
        lines = [
            f"INAR({args.order}) goodness-of-fit test, s={s}, a={args.weight:g}, B={args.bootstrap}",
            f"n = {series.n}",
            "alpha = " + ", ".join(f"{a:.4f}" for a in model.alphas),
            f"innovation mean = {model.innovations.mean():.4f}",
            f"statistic = {res.statistic:.6g}",
            f"p-value = {res.p_value:.4f} ({verdict} at level {args.level:g})",
        ]
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_estimate(args) -> int:
    series = read_counts(args.input)
    fit = fit_semiparametric(series, args.order)
    if fit.degenerate:
        raise DegenerateInput("constant series: the INAR coefficients are not identified")
    model = fit.model
    doc = {
        "n": series.n,
        "p": args.order,
        "alphas": _floats(model.alphas),
        "innovation_pmf": _floats(model.innovations.masses),
        "innovation_mean": model.innovations.mean(),
        "loglik": fit.loglik,
        "iterations": fit.iterations,
        "converged": bool(fit.converged),
        "boundary": bool(fit.boundary),
    }
    if args.json:
        _emit(_json(doc), args.out)
    else:
        lines = ["alpha = " + ", ".join(f"{a:.6f}" for a in model.alphas),
                 f"innovation mean = {model.innovations.mean():.6f}",
                 f"log-likelihood = {fit.loglik:.6f} ({fit.iterations} iterations)"]
        lines += [f"G({k}) = {m:.6f}" for k, m in enumerate(model.innovations.masses)]
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    spec = parse_dgp(args.dgp, burn_in=args.burnin)
    x = simulate(spec, args.n, RngStream(args.seed).generator())
    _emit(write_counts(x), args.out)
    return EXIT_OK


def cmd_summary(args) -> int:
    series = read_counts(args.input)
    mean, var, disp = sample_moments(series)
    max_lag = min(args.max_lag, series.n - 1)
    acf = sample_acf(series, max_lag)
    pacf = sample_pacf(series, max_lag)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["quantity", "lag", "value"])
    w.writerow(["n", "", series.n])
    w.writerow(["mean", "", repr(mean)])
    w.writerow(["variance", "", repr(var)])
    w.writerow(["dispersion_index", "", repr(disp)])
    for k in range(1, max_lag + 1):
        w.writerow(["acf", k, repr(float(acf[k]))])
    for k in range(1, max_lag + 1):
        w.writerow(["pacf", k, repr(float(pacf[k]))])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_experiment(args) -> int:
    if args.spec:
        specs = specs_from_json(Path(args.spec).read_text(encoding="utf-8"))
        if args.scale:
            specs = rescale(specs, args.scale)
    else:
        specs = preset(args.preset, M=args.scale or DEFAULT_M, seed=args.seed, level=args.level)
    rows = run_experiments(specs, threads=args.threads)
    for row in rows:
        if not row.valid:
            sp = row.spec
            print(f"warning: {sp.dgp.label} n={sp.n} a={sp.a:g}: {row.excluded} of {sp.M} samples "
                  "excluded; cell marked invalid", file=sys.stderr)
    buf = io.StringIO()
    write_rows(rows, buf)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_heatmap(args) -> int:
    series = read_counts(args.input)
    fit = fit_semiparametric(series, args.order)
    if fit.degenerate:
        raise DegenerateInput("constant series: the INAR coefficients are not identified")
    grid = weighted_squared_difference(fit.model, series, args.weight, args.grid)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["u0", "u1", "value"])
    for u0, u1, v in grid:
        w.writerow([repr(float(u0)), repr(float(u1)), repr(float(v))])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="inargof", description="Semi-parametric goodness-of-fit tests for INAR count time series.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, with_input=True, with_out=True):
        if with_input:
            p.add_argument("input", help="count file: one integer per line or a single-column CSV")
        if with_out:
            p.add_argument("--out", "-o", default=None, help="output path (default: stdout)")

    p = sub.add_parser("test", help="bootstrap goodness-of-fit test of an INAR(p) null")
    common(p)
    p.add_argument("--order", "-p", type=_positive_int, default=1)
    p.add_argument("--stat-order", "-s", type=_positive_int, default=None, help="pgf order (default: p)")
    p.add_argument("--weight", "-a", type=_nonneg_float, default=5.0)
    p.add_argument("--bootstrap", "-B", type=_positive_int, default=1000)
    p.add_argument("--burnin", "-r", type=int, default=DEFAULT_BURN_IN)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=("closed", "quad"), default=None,
                   help="statistic evaluation (default: closed for integer a, else quad)")
    p.add_argument("--level", type=float, default=0.05, help="level used for the text verdict")
    p.add_argument("--threads", type=_positive_int, default=_default_threads())
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("estimate", help="semi-parametric INAR(p) estimation")
    common(p)
    p.add_argument("--order", "-p", type=_positive_int, default=1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("simulate", help="simulate a count series")
    common(p, with_input=False)
    p.add_argument("--dgp", required=True, help='e.g. "poi-inar1:lambda=1,alpha=0.5"')
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--burnin", type=int, default=DEFAULT_BURN_IN)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("summary", help="moments, dispersion index, ACF and PACF as CSV")
    common(p)
    p.add_argument("--max-lag", type=_positive_int, default=10)
    p.set_defaults(func=cmd_summary)

    p = sub.add_parser("experiment", help="Monte Carlo size/power table as CSV")
    common(p, with_input=False)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(PRESETS))
    src.add_argument("--spec", help="JSON file with a list of experiment cells")
    p.add_argument("--scale", type=_positive_int, default=None, help=f"Monte Carlo samples M (default {DEFAULT_M})")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--level", type=float, default=0.05)
    p.add_argument("--threads", type=_positive_int, default=_default_threads())
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("heatmap", help="weighted squared pgf difference on a grid, as CSV")
    common(p)
    p.add_argument("--order", "-p", type=_positive_int, default=1)
    p.add_argument("--weight", "-a", type=_nonneg_float, default=5.0)
    p.add_argument("--grid", type=_positive_int, default=21)
    p.set_defaults(func=cmd_heatmap)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except FIT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FIT
    except (InarError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
