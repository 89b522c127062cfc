"""Command-line interface.

Subcommands write CSV tables plus a ``*.manifest.json`` describing the run
(flags, seed, version, timestamps and which defaults are our own choices).
CSV bodies depend only on flags and seed, never on the clock.

Values starting with ``-`` must be attached with ``=``, e.g. ``--bounds=-10:10``.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .datasets import make_linear
from .driver import IqlsConfig, run_iqls
from .encoding import SearchBox, make_encoding
from .exceptions import BudgetExceededError, InvalidArgumentError, RankDeficientError
from .linalg import Dataset, classical_ls, gram, mse
from .qubo import build_qubo, export_qubo
from .solvers import BACKENDS, AnnealConfig
from .splines import BENCHMARK_NAMES, benchmark_functions, design_matrix, evaluate, uniform_knots

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_BUDGET = 4

DEFAULT_BOUNDS = (-10.0, 10.0)
CURVE_POINTS = 400

NOTE_BOUNDS = "initial bounds not given by the method description; default [-10, 10] per weight is ours"
NOTE_INTERCEPT = "no intercept column added unless --intercept is passed"
NOTE_ANNEAL = "simulated-annealing schedule (restarts, sweeps, beta range) is ours"
NOTE_NOISE = "noise level is ours; default is noiseless"
NOTE_SPLINE = "truncated-power linear spline basis with uniform interior knots"
NOTE_TARGETS = "benchmark target functions are a stand-in set chosen by us"


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    return repr(float(x))


def _default_seed() -> int:
    raw = os.environ.get("IQLS_DEFAULT_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"IQLS_DEFAULT_SEED must be an integer, got {raw!r}") from None


def _parse_range(text, what):
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"{what} must look like lo:hi, got {text!r}") from None
    if not lo < hi:
        raise UsageError(f"{what}: need lo < hi, got {text!r}")
    return lo, hi


def read_dataset(path) -> Dataset:
    """Load a CSV with header ``x1,...,xd,y``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise UsageError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    d = len(header) - 1
    if d < 1 or header != [f"x{i}" for i in range(1, d + 1)] + ["y"]:
        raise UsageError(f"{path}: header must be x1,...,xd,y, got {','.join(header)}")
    try:
        data = np.array([[float(v) for v in row] for row in rows[1:] if row], dtype=np.float64)
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None
    if data.ndim != 2 or data.shape[0] == 0 or data.shape[1] != d + 1:
        raise UsageError(f"{path}: every row needs {d + 1} values")
    return Dataset(data[:, :d], data[:, d])


def write_dataset(path, X, y):
    d = X.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"x{i}" for i in range(1, d + 1)] + ["y"])
        for xi, yi in zip(X, y):
            w.writerow([_fmt(v) for v in xi] + [_fmt(yi)])


def _box_from_flag(text, d):
    if text is None:
        return SearchBox.uniform(*DEFAULT_BOUNDS, d), True
    if ":" in text and not Path(text).exists():
        lo, hi = _parse_range(text, "--bounds")
        return SearchBox.uniform(lo, hi, d), False
    # per-weight file: one "lower,upper" row per weight, optional header
    with open(text, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if rows and rows[0][0].strip().lower() == "lower":
        rows = rows[1:]
    try:
        b = np.array([[float(v) for v in r] for r in rows])
    except ValueError as exc:
        raise UsageError(f"{text}: {exc}") from None
    if b.shape != (d, 2):
        raise UsageError(f"{text}: need {d} rows of lower,upper, got shape {b.shape}")
    return SearchBox.from_bounds(b[:, 0], b[:, 1]), False


def _config_from_args(args, d, notes):
    box, default_box = _box_from_flag(args.bounds, d)
    if default_box:
        notes.append(NOTE_BOUNDS)
    notes.append(NOTE_ANNEAL)
    return IqlsConfig(
        bits_per_weight=args.bits,
        max_iterations=args.iterations,
        initial_box=box,
        solver=args.solver,
        anneal=AnnealConfig(
            seed=args.seed,
            num_restarts=args.restarts,
            sweeps_per_restart=args.sweeps,
            beta_initial=args.beta_initial,
            beta_final=args.beta_final,
        ),
        loss_tolerance=args.loss_tolerance,
    )


def trace_rows(trace):
    """Header and rows of the per-iteration CSV.

    Row ``k`` holds the MSE and SSE of the weights picked at iteration ``k``
    and the box produced from them, which has width ``width_0 / factor**k``.
    """
    d = trace.config.initial_box.dim
    header = ["iteration", "mse", "sse"]
    for i in range(1, d + 1):
        header += [f"lower_{i}", f"upper_{i}", f"w_{i}"]
    rows = []
    for rec in trace.records:
        row = [str(rec.iteration), _fmt(rec.mse), _fmt(rec.sse)]
        for lo, hi, w in zip(rec.box_after.lower, rec.box_after.upper, rec.weights):
            row += [_fmt(lo), _fmt(hi), _fmt(w)]
        rows.append(row)
    return header, rows


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_json(path, doc):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def _manifest_path(out):
    out = Path(out)
    stem = out.with_suffix("") if out.suffix in (".csv", ".json") else out
    return stem.parent / f"{stem.name}.manifest.json"


def _now():
    return dt.datetime.now(dt.timezone.utc).isoformat()


def _write_manifest(path, args, started, notes, extra=None):
    flags = {k: v for k, v in vars(args).items() if k != "func"}
    doc = {
        "command": args.command,
        "flags": flags,
        "seed": getattr(args, "seed", None),
        "version": __version__,
        "started": started,
        "finished": _now(),
        "notes": notes,
    }
    if extra:
        doc.update(extra)
    _write_json(path, doc)


def cmd_gen_data(args):
    started = _now()
    lo, hi = _parse_range(args.domain, "--domain")
    if args.dim < 1 or args.samples < 1:
        raise UsageError("--dim and --samples must be positive")
    if args.noise < 0:
        raise UsageError("--noise must be non-negative")
    ds, w_true = make_linear(args.samples, args.dim, (lo, hi), args.noise, args.seed)
    write_dataset(args.out, ds.X, ds.y)
    notes = [NOTE_NOISE, "true weights drawn uniformly from [-5, 5]"]
    _write_manifest(_manifest_path(args.out), args, started, notes, {"true_weights": w_true.tolist()})
    return EXIT_OK


def cmd_fit_linear(args):
    started = _now()
    ds = read_dataset(args.data)
    notes = [NOTE_INTERCEPT]
    if args.intercept:
        ds = Dataset(np.column_stack([ds.X, np.ones(ds.n_samples)]), ds.y)
    cfg = _config_from_args(args, ds.n_features, notes)
    trace = run_iqls(ds, cfg)
    prefix = Path(args.out)
    _write_csv(f"{prefix}.trace.csv", *trace_rows(trace))
    _write_json(f"{prefix}.trace.json", trace.to_dict())
    _write_manifest(f"{prefix}.manifest.json", args, started, notes,
                    {"final_mse": trace.records[-1].mse, "stop_reason": trace.stop_reason})
    return EXIT_OK


def cmd_fit_spline(args):
    started = _now()
    target = benchmark_functions()[args.target]
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    x, y = target.sample(args.samples)
    basis = uniform_knots(target.x_min, target.x_max, args.knots)
    ds = Dataset(design_matrix(basis, x), y)
    notes = [NOTE_SPLINE, NOTE_TARGETS]
    cfg = _config_from_args(args, ds.n_features, notes)
    trace = run_iqls(ds, cfg)
    try:
        classical_mse = mse(ds, classical_ls(ds))
    except RankDeficientError as exc:
        logger.warning("classical reference unavailable: %s", exc)
        classical_mse = None

    grid = np.linspace(target.x_min, target.x_max, CURVE_POINTS)
    truth = target(grid)
    curves = []
    for rec in trace.records:
        fit = evaluate(basis, rec.weights, grid)
        curves += [[str(rec.iteration), _fmt(g), _fmt(f), _fmt(t)] for g, f, t in zip(grid, fit, truth)]
    prefix = Path(args.out)
    _write_csv(f"{prefix}.trace.csv", *trace_rows(trace))
    _write_csv(f"{prefix}.curves.csv", ["iteration", "x", "fit", "target"], curves)
    summary = {
        "target": args.target,
        "knots": basis.knots.tolist(),
        "num_vars": ds.n_features * args.bits,
        "final_mse": trace.records[-1].mse,
        "classical_mse": classical_mse,
    }
    _write_json(f"{prefix}.trace.json", {**trace.to_dict(), **summary})
    _write_manifest(f"{prefix}.manifest.json", args, started, notes, summary)
    return EXIT_OK


def cmd_sweep_bits(args):
    started = _now()
    ds = read_dataset(args.data)
    notes = [NOTE_INTERCEPT]
    try:
        m_list = [int(v) for v in args.bits_list.split(",")]
    except ValueError:
        raise UsageError(f"--bits-list must be comma-separated integers, got {args.bits_list!r}") from None
    rows = []
    finals = {}
    for m in sorted(set(m_list)):
        args.bits = m
        cfg = _config_from_args(args, ds.n_features, [])
        trace = run_iqls(ds, cfg)
        rows += [[str(m), str(r.iteration), _fmt(r.mse)] for r in trace.records]
        finals[str(m)] = trace.records[-1].mse
    del args.bits
    notes += [NOTE_ANNEAL] + ([NOTE_BOUNDS] if args.bounds is None else [])
    _write_csv(args.out, ["m", "iteration", "mse"], rows)
    _write_manifest(_manifest_path(args.out), args, started, notes, {"final_mse": finals})
    return EXIT_OK


def cmd_export_qubo(args):
    started = _now()
    ds = read_dataset(args.data)
    notes = [NOTE_INTERCEPT]
    box, default_box = _box_from_flag(args.bounds, ds.n_features)
    if default_box:
        notes.append(NOTE_BOUNDS)
    q = build_qubo(gram(ds), make_encoding(box, args.bits))
    with open(args.out, "w") as fh:
        fh.write(export_qubo(q))
        fh.write("\n")
    _write_manifest(_manifest_path(args.out), args, started, notes, {"num_vars": q.num_vars})
    return EXIT_OK


def _add_solver_flags(p):
    p.add_argument("--solver", choices=BACKENDS, default="auto")
    p.add_argument("--seed", type=int, default=None, help="default: $IQLS_DEFAULT_SEED or 0")
    p.add_argument("--restarts", type=int, default=AnnealConfig.num_restarts)
    p.add_argument("--sweeps", type=int, default=AnnealConfig.sweeps_per_restart)
    p.add_argument("--beta-initial", type=float, default=AnnealConfig.beta_initial)
    p.add_argument("--beta-final", type=float, default=AnnealConfig.beta_final)


def _add_fit_flags(p, bits=2, iterations=10):
    p.add_argument("-m", "--bits", type=int, default=bits, help="bits per weight")
    p.add_argument("-k", "--iterations", type=int, default=iterations)
    p.add_argument("--bounds", default=None,
                   help="lo:hi for every weight, or a CSV of lower,upper rows (default -10:10)")
    p.add_argument("--loss-tolerance", type=float, default=0.0)
    _add_solver_flags(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iqls", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="synthetic linear regression data")
    p.add_argument("-d", "--dim", type=int, default=2)
    p.add_argument("-n", "--samples", type=int, default=100)
    p.add_argument("--domain", default="-5:5", help="feature range lo:hi")
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("fit-linear", help="fit a linear model to a dataset CSV")
    p.add_argument("data")
    p.add_argument("--intercept", action="store_true", help="append a constant feature")
    _add_fit_flags(p)
    p.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(func=cmd_fit_linear)

    p = sub.add_parser("fit-spline", help="fit a linear spline to a benchmark function")
    p.add_argument("--target", choices=BENCHMARK_NAMES, required=True)
    p.add_argument("--knots", type=int, default=20)
    p.add_argument("--samples", type=int, default=200)
    _add_fit_flags(p, bits=1, iterations=10)
    p.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(func=cmd_fit_spline)

    p = sub.add_parser("sweep-bits", help="MSE per iteration for several bit widths")
    p.add_argument("data")
    p.add_argument("--bits-list", default="1,2,3,6")
    p.add_argument("-k", "--iterations", type=int, default=10)
    p.add_argument("--bounds", default=None)
    p.add_argument("--loss-tolerance", type=float, default=0.0)
    _add_solver_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep_bits)

    p = sub.add_parser("export-qubo", help="write the first-iteration QUBO as JSON")
    p.add_argument("data")
    p.add_argument("-m", "--bits", type=int, default=2)
    p.add_argument("--bounds", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_qubo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if hasattr(args, "seed") and args.seed is None:
            args.seed = _default_seed()
        return args.func(args)
    except (UsageError, InvalidArgumentError) as exc:
        print(f"iqls {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceededError as exc:
        print(f"iqls {args.command}: solver budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except OSError as exc:
        print(f"iqls {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
