"""Command-line interface.

Three subcommands:

* ``simulate`` writes a synthetic dataset (points CSV or binary plus a
  label sidecar) to disk.
* ``cluster`` runs one method once on a prediction file and writes a JSON
  report (and optionally the predicted labels).
* ``bench`` runs a full method-by-run matrix from a config file and writes
  the JSON report plus an aligned text table.

Exit codes: 0 success, 1 configuration error, 2 data error, 3 method
failure (single-run mode only).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import __version__
from .bench import (
    MethodSpec,
    format_table,
    load_config,
    run_bench,
    run_method,
    validate_report,
)
from .datasets import (
    load_labels,
    load_predictions,
    make_isimus,
    sample_dirichlet_mixture,
    save_csv,
    save_labels,
    save_spxd,
    simu_spec,
)
from .errors import ConfigError, DataError, SBetasError
from .metrics import argmax_align, evaluate, hungarian_align

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_METHOD = 3


class _Parser(argparse.ArgumentParser):
    # route argparse's own failures through the config-error exit code
    def error(self, message):
        raise ConfigError(message)


def _build_parser():
    parser = _Parser(prog="sbetas", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"sbetas {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="write a synthetic benchmark dataset")
    sim.add_argument("--dataset", choices=("simu", "isimus"), required=True)
    sim.add_argument("--n", type=int, default=100_000)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True, help="output points file (.csv or .spxd)")
    sim.add_argument("--format", choices=("csv", "spxd"), default=None)

    clu = sub.add_parser("cluster", help="run one method on a prediction file")
    clu.add_argument("--method", required=True)
    clu.add_argument("--input", required=True)
    clu.add_argument("--labels", default=None)
    clu.add_argument("--k", type=int, default=None)
    clu.add_argument("--delta", type=float, default=0.15)
    clu.add_argument("--tau-minus", type=float, default=1.0)
    clu.add_argument("--tau-plus", type=float, default=165.0)
    clu.add_argument("--iters", type=int, default=25)
    clu.add_argument("--estimator", choices=("mom", "mle"), default="mom")
    clu.add_argument("--pi", choices=("adaptive", "uniform"), default="adaptive")
    clu.add_argument("--init", default="vertex")
    clu.add_argument("--align", choices=("hungarian", "argmax"), default="hungarian")
    clu.add_argument("--out", default=None, help="report JSON path (default stdout)")
    clu.add_argument("--labels-out", default=None, help="write predicted labels here")

    ben = sub.add_parser("bench", help="run a bench config matrix")
    ben.add_argument("--config", required=True)
    ben.add_argument("--out", required=True, help="output directory")
    return parser


def _points_paths(out, fmt):
    base, ext = os.path.splitext(out)
    if fmt is None:
        fmt = "spxd" if ext == ".spxd" else "csv"
    if not ext:
        out = out + ("." + fmt)
        base = os.path.splitext(out)[0]
    return out, base + ".labels.txt", fmt


def _write_dataset(ds, out, fmt):
    if fmt == "spxd":
        save_spxd(out, ds.data)
    else:
        save_csv(out, ds.data)
    points_path, labels_path, _ = _points_paths(out, fmt)
    save_labels(labels_path, ds.labels)
    return points_path, labels_path


def _cmd_simulate(args):
    out, _, fmt = _points_paths(args.out, args.format)
    if args.dataset == "simu":
        ds = sample_dirichlet_mixture(simu_spec(n=args.n, seed=args.seed))
        points_path, labels_path = _write_dataset(ds, out, fmt)
        print(f"wrote {points_path} and {labels_path} ({args.n} rows)")
        return EXIT_OK
    base, ext = os.path.splitext(out)
    for i, spec in enumerate(make_isimus(args.seed, n=args.n)):
        ds = sample_dirichlet_mixture(spec)
        part = f"{base}_p{i}{ext}"
        points_path, labels_path = _write_dataset(ds, part, fmt)
        print(f"wrote {points_path} and {labels_path} (weights {spec.weights})")
    return EXIT_OK


def _cmd_cluster(args):
    X = load_predictions(args.input)
    true = load_labels(args.labels) if args.labels else None
    if true is not None and true.shape[0] != X.shape[0]:
        raise DataError(f"{args.labels}: {true.shape[0]} labels for {X.shape[0]} rows")
    n_classes = int(true.max()) + 1 if true is not None else X.shape[1]
    k = args.k if args.k is not None else n_classes
    method = MethodSpec(
        name=args.method,
        options={
            "delta": args.delta,
            "tau_minus": args.tau_minus,
            "tau_plus": args.tau_plus,
            "iters": args.iters,
            "estimator": args.estimator,
            "pi": args.pi,
            "init": args.init,
        },
    )
    if args.align == "argmax" and true is None:
        raise ConfigError("--align argmax needs --labels (majority vote)")
    record = {
        "method": args.method,
        "run": 0,
        "seed": 0,
        "status": "ok",
        "nmi": None,
        "accuracy": None,
        "mean_iou": None,
        "seconds": None,
        "iterations": None,
        "converged": None,
    }
    labels = None
    try:
        t0 = time.perf_counter()
        labels, centroids, iterations, converged = run_method(X, method, k)
        record["seconds"] = time.perf_counter() - t0
        record["iterations"] = iterations
        record["converged"] = bool(converged)
        if true is not None:
            if args.align == "hungarian" and k == n_classes:
                alignment = hungarian_align(centroids, n_classes)
            else:
                alignment = argmax_align(labels, true, k, n_classes)
            rep = evaluate(labels, true, alignment, n_classes)
            record["nmi"] = rep.nmi
            record["accuracy"] = rep.accuracy
            record["mean_iou"] = rep.mean_iou
    except (ConfigError, DataError):
        raise
    except (SBetasError, FloatingPointError) as exc:
        record["status"] = "fails"
        record["error"] = f"{type(exc).__name__}: {exc}"
    report = {
        "schema_version": 1,
        "tool": {"name": "sbetas", "version": __version__},
        "config": {
            "dataset": args.input,
            "n": int(X.shape[0]),
            "seed": 0,
            "runs": 1,
            "align": args.align,
            "methods": [{"name": method.name, "options": dict(method.options)}],
        },
        "runs": [record],
        "aggregates": {},
    }
    validate_report(report)
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.labels_out and labels is not None:
        save_labels(args.labels_out, labels)
    return EXIT_OK if record["status"] == "ok" else EXIT_METHOD


def _cmd_bench(args):
    config = load_config(args.config)
    report = run_bench(config)
    os.makedirs(args.out, exist_ok=True)
    json_path = os.path.join(args.out, "report.json")
    with open(json_path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    table = format_table(report)
    table_path = os.path.join(args.out, "report.txt")
    with open(table_path, "w", encoding="utf-8") as fh:
        fh.write(table)
    print(table, end="")
    print(f"report: {json_path}")
    return EXIT_OK


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "cluster":
            return _cmd_cluster(args)
        return _cmd_bench(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
