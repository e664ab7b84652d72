"""Command-line interface: ``betaspectra <subcommand> [options]``.

Subcommands: sample, histogram, deviation, fluctuate, theory, paths.
CSV output starts with one ``# key=value ...`` line echoing the resolved
configuration; JSON output wraps the same fields as ``{"config", "data"}``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import mc, paths, sturm, theory, traces
from .ensembles import EnsembleSpec, sample
from .errors import DomainError
from .parallel import resolve_workers
from .rng import RngStream

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, EXIT_BAND = 0, 1, 2, 3


def _beta(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError("beta must be positive or 'inf'")
    return v


def _common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default="-", help="output path ('-' for stdout)")
    p.add_argument("--strict", action="store_true", help="non-zero exit when a statistical band fails")
    p.add_argument("--workers", type=int, default=None, help="thread count (default $SPECTRAL_WORKERS or all cores)")


def _ensemble(p, n_default=100):
    p.add_argument("--family", choices=("hermite", "laguerre"), default="hermite")
    p.add_argument("--beta", type=_beta, default=2.0, help="positive real or 'inf'")
    p.add_argument("--n", type=int, default=n_default)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--gamma", type=float, default=None)
    g.add_argument("--a", type=float, default=None)
    p.add_argument("--unscaled", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="betaspectra", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="write one sampled matrix")
    _ensemble(p, 10)
    _common(p)

    p = sub.add_parser("histogram", help="Sturm-count histogram of one sample")
    _ensemble(p, 300)
    p.add_argument("--bins", type=int, default=25)
    p.add_argument("--lo", type=float, default=None)
    p.add_argument("--hi", type=float, default=None)
    p.add_argument("--density", action="store_true", help="add a normalised density column")
    _common(p)

    p = sub.add_parser("deviation", help="count deviation on beta = inf Hermite matrices")
    p.add_argument("--n-start", type=int, default=100000)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--lo", type=float, default=0.2)
    p.add_argument("--hi", type=float, default=0.8)
    p.add_argument("--tol", type=float, default=0.02, help="band around the theoretical value")
    _common(p)

    p = sub.add_parser("fluctuate", help="Monte Carlo covariance of centred traces vs theory")
    _ensemble(p, 2048)
    p.add_argument("--kmax", type=int, default=4)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--z-max", type=float, default=3.0)
    _common(p)

    p = sub.add_parser("theory", help="moment and covariance tables")
    p.add_argument("--family", choices=("hermite", "laguerre"), default="hermite")
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--kmax", type=int, default=6)
    _common(p)

    p = sub.add_parser("paths", help="descent-class tables of lattice paths")
    p.add_argument("--k", type=int, default=4, help="largest k")
    p.add_argument("--alternating", action="store_true")
    _common(p)
    return ap


def _spec(args) -> EnsembleSpec:
    gamma, a = args.gamma, args.a
    if args.family == "laguerre" and gamma is None and a is None:
        gamma = 0.5
    if args.family == "hermite":
        gamma = a = None
    return EnsembleSpec(args.family, args.beta, args.n, a=a, gamma=gamma, scaled=not args.unscaled)


class Output:
    """Collects a table and metadata and writes CSV or JSON."""

    def __init__(self, config: dict):
        self.config = config
        self.columns: list = []
        self.rows: list = []
        self.extra: dict = {}

    def table(self, columns, rows):
        self.columns, self.rows = list(columns), [list(r) for r in rows]

    def render(self, fmt: str) -> str:
        if fmt == "json":
            data = {"columns": self.columns, "rows": self.rows, **self.extra}
            return json.dumps({"config": self.config, "data": data}, indent=2, default=_jsonable) + "\n"
        buf = io.StringIO()
        meta = {**self.config, **{k: v for k, v in self.extra.items() if np.isscalar(v)}}
        buf.write("# " + " ".join(f"{k}={_fmt(v)}" for k, v in meta.items()) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()


def _jsonable(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    raise TypeError(type(v))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("handler", "out")}
    if "workers" in cfg:
        cfg["workers"] = resolve_workers(args.workers)
    return cfg


def cmd_sample(args, out: Output):
    spec = _spec(args)
    out.config.update(gamma=spec.gamma, a=spec.a)
    M = sample(spec, RngStream(args.seed))
    second = M.offdiag if spec.family == "hermite" else M.subdiag
    name = "offdiag" if spec.family == "hermite" else "subdiag"
    out.table(["i", "diag", name], [(i + 1, M.diag[i], second[i] if i < M.n - 1 else None) for i in range(M.n)])
    return f"sampled {spec.family} n={spec.n} beta={spec.beta}", True


def _tridiagonal_for(spec, seed):
    M = sample(spec, RngStream(seed))
    return M if spec.family == "hermite" else traces.gram_tridiagonal(M)


def cmd_histogram(args, out: Output):
    spec = _spec(args)
    if args.bins < 1:
        raise DomainError("bins must be positive")
    T = _tridiagonal_for(spec, args.seed)
    if spec.family == "hermite":
        lo, hi = (-1.0, 1.0) if spec.scaled else (-math.sqrt(2 * spec.n * spec.beta), math.sqrt(2 * spec.n * spec.beta))
    else:
        a, b = theory.mp_support(spec.gamma)
        c = 1.0 if spec.scaled else spec.n * spec.beta / spec.gamma
        lo, hi = a * c, b * c
    lo = args.lo if args.lo is not None else lo
    hi = args.hi if args.hi is not None else hi
    out.config.update(gamma=spec.gamma, a=spec.a, lo=lo, hi=hi)
    h = sturm.histogram(T, np.linspace(lo, hi, args.bins + 1))
    cols = ["edge_lo", "edge_hi", "count"] + (["density"] if args.density else [])
    dens = h.density()
    out.table(cols, [(h.edges[j], h.edges[j + 1], int(h.counts[j])) + ((dens[j],) if args.density else ())
                     for j in range(args.bins)])
    out.extra.update(below_first=h.below_first, above_last=h.above_last, total=int(h.counts.sum()))
    return f"{int(h.counts.sum())} of {h.n} eigenvalues in [{lo}, {hi}]", True


def cmd_deviation(args, out: Output):
    rep = sturm.deviation_experiment(args.n_start, args.count, args.lo, args.hi, workers=args.workers)
    ok = abs(rep.mean_deviation - rep.theoretical) <= args.tol
    out.table(["n", "deviation"], zip(rep.ns.tolist(), rep.per_n_deviations.tolist()))
    out.extra.update(mean_deviation=rep.mean_deviation, theoretical=rep.theoretical, band_pass=ok)
    return (f"mean deviation {rep.mean_deviation:.5f}, theoretical {rep.theoretical:.5f} "
            f"[{'PASS' if ok else 'FAIL'} within {args.tol}]"), ok


def cmd_fluctuate(args, out: Output):
    spec = _spec(args)
    if not spec.scaled:
        raise DomainError("fluctuation experiments use the scaled ensembles")
    out.config.update(gamma=spec.gamma, a=spec.a)
    rep = mc.run_trials(spec, args.kmax, args.trials, args.seed, workers=args.workers, keep_samples=False)
    if spec.family == "hermite":
        th = theory.covariance_matrix("hermite", args.kmax)
        printed = None
    else:
        th = theory.covariance_matrix("laguerre", args.kmax, spec.gamma)
        printed = mc.compare_to_theory(rep, theory.covariance_matrix("laguerre", args.kmax, spec.gamma, "printed"), spec.beta)
    zs = mc.compare_to_theory(rep, th, spec.beta)
    cols = ["i", "j", "cov", "cov_se", "theory", "z"] + (["theory_printed", "z_printed"] if printed else [])
    rows = []
    for i in range(args.kmax):
        for j in range(i, args.kmax):
            row = [i + 1, j + 1, rep.cov[i, j], rep.cov_se[i, j], zs.expected[i, j], zs.z[i, j]]
            if printed:
                row += [printed.expected[i, j], printed.z[i, j]]
            rows.append(row)
    out.table(cols, rows)
    ok = zs.max_abs < args.z_max
    out.extra.update(max_abs_z=zs.max_abs, band_pass=ok, wall_time=rep.wall_time,
                     mean=rep.mean.tolist(), mean_se=rep.mean_se.tolist())
    msg = f"max |z| = {zs.max_abs:.2f} over {len(rows)} entries [{'PASS' if ok else 'FAIL'} < {args.z_max}]"
    if printed:
        msg += f"; printed-formula z(1,1) = {printed.z[0, 0]:.1f}"
    return msg, ok


def cmd_theory(args, out: Output):
    fam, K = args.family, args.kmax
    if fam == "laguerre":
        theory.mp_support(args.gamma)
    else:
        out.config["gamma"] = None
    rows = []
    for k in range(1, K + 1):
        if fam == "hermite":
            rows.append(["moment", k, "", theory.semicircle_moment(k), theory.dev_moment_hermite(k), ""])
        else:
            rows.append(["moment", k, "", theory.mp_moment(k, args.gamma), theory.dev_moment_laguerre(k, args.gamma), ""])
    C = theory.covariance_matrix(fam, K, args.gamma if fam == "laguerre" else None)
    P = theory.covariance_matrix(fam, K, args.gamma, "printed") if fam == "laguerre" else None
    for i in range(K):
        for j in range(i, K):
            rows.append(["cov", i + 1, j + 1, C.entries[i, j], "", P.entries[i, j] if P is not None else ""])
    out.table(["kind", "i", "j", "value", "deviation_moment", "value_printed"], rows)
    return f"{fam} tables up to order {K}", True


def cmd_paths(args, out: Output):
    rows = paths.count_table(args.k, args.alternating)
    out.table(["k", "r", "i", "count"], rows)
    sizes = {f"size_{k}_{r}": paths.family_size(k, r, args.alternating)
             for k in range(1, args.k + 1) for r in range((k if args.alternating else k // 2) + 1)}
    out.extra.update(sizes)
    return f"{len(rows)} descent classes for k <= {args.k}", True


HANDLERS = {"sample": cmd_sample, "histogram": cmd_histogram, "deviation": cmd_deviation,
            "fluctuate": cmd_fluctuate, "theory": cmd_theory, "paths": cmd_paths}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        out = Output(_config(args))
        summary, ok = HANDLERS[args.command](args, out)
        text = out.render(args.format)
    except (DomainError, ValueError) as exc:
        print(f"betaspectra {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - report and exit non-zero
        print(f"betaspectra {args.command}: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    try:
        if args.out == "-":
            sys.stdout.write(text)
            print(summary, file=sys.stderr)
        else:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
            print(summary)
    except OSError as exc:
        print(f"betaspectra {args.command}: cannot write output: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if args.strict and not ok:
        return EXIT_BAND
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
