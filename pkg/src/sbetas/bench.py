"""Benchmark harness: run clustering methods over datasets and report metrics.

A bench config names one dataset (synthetic generator or prediction file),
a repetition count, and a list of methods with per-method options. Every
(method, run) pair is an independent seeded job: generate or load the
data, fit, align clusters to classes, score, and time the fit. Failures
of one job are recorded and never abort the batch. Reports carry a schema
version and are validated on every emission.
"""
from __future__ import annotations

import configparser
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .baselines import (
    DISTORTION_KINDS,
    DistortionConfig,
    KDirsConfig,
    argmax_baseline,
    distortion_kmeans,
    k_dirs,
)
from .clustering import ClusterRunConfig, ConstraintConfig, EstimatorConfig, fit
from .datasets import (
    load_labels,
    load_predictions,
    make_isimus,
    sample_dirichlet_mixture,
    simu_spec,
)
from .errors import ConfigError, DataError, SBetasError
from .metrics import argmax_align, evaluate, hungarian_align
from .simplex import vertices

__all__ = [
    "SCHEMA_VERSION",
    "METHOD_NAMES",
    "WORKERS_ENV_VAR",
    "MethodSpec",
    "BenchConfig",
    "load_config",
    "run_method",
    "run_bench",
    "validate_report",
    "format_table",
]

SCHEMA_VERSION = 1

WORKERS_ENV_VAR = "SBETAS_WORKERS"

DISTORTION_METHODS = {
    "k-means": "euclidean",
    "k-medians": "manhattan",
    "kl-k-means": "kl",
    "hsc": "hilbert",
}

METHOD_NAMES = ("argmax", "k-sbetas", "k-dirs") + tuple(DISTORTION_METHODS)

_METHOD_OPTION_KEYS = {
    "delta",
    "tau_minus",
    "tau_plus",
    "iters",
    "estimator",
    "pi",
    "init",
    "k",
    "align",
    "lambda0",
    "unimodal",
}


@dataclass(frozen=True)
class MethodSpec:
    """A method plus its options; ``label`` distinguishes two runs of the
    same method (e.g. adaptive vs uniform proportions) in reports."""

    name: str
    options: dict = field(default_factory=dict)
    label: str = ""

    def __post_init__(self):
        if self.name not in METHOD_NAMES:
            raise ConfigError(
                f"unknown method {self.name!r}; known: {', '.join(METHOD_NAMES)}"
            )
        unknown = set(self.options) - _METHOD_OPTION_KEYS
        if unknown:
            raise ConfigError(
                f"method {self.name}: unknown options {sorted(unknown)}"
            )
        if not self.label:
            object.__setattr__(self, "label", self.name)


@dataclass(frozen=True)
class BenchConfig:
    """One benchmark matrix.

    ``dataset`` is "simu", "isimus", or a prediction-file path. For
    "isimus" the run index selects the weight permutation, so the matrix
    always spans exactly 6 runs regardless of ``runs``.
    """

    dataset: str
    methods: tuple
    runs: int = 5
    n: int = 100_000
    seed: int = 0
    labels_path: str | None = None
    align: str = "hungarian"

    def __post_init__(self):
        if self.runs < 0:
            raise ConfigError("runs must be nonnegative")
        if self.n < 1:
            raise ConfigError("n must be positive")
        if self.align not in ("hungarian", "argmax"):
            raise ConfigError(f"unknown alignment {self.align!r}")
        if not self.methods:
            raise ConfigError("at least one method required")

    @property
    def effective_runs(self):
        return 6 if self.dataset == "isimus" else self.runs


def load_config(path):
    """Parse the INI-style bench config.

    Sections: [dataset] (name or path, n, seed, labels), [bench] (runs,
    align), and one [method <name>] section per method with that method's
    options as plain key = value pairs.
    """
    parser = configparser.ConfigParser()
    try:
        read = parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not read:
        raise ConfigError(f"config file not found: {path}")
    if "dataset" not in parser:
        raise ConfigError("config needs a [dataset] section")
    ds = parser["dataset"]
    dataset = ds.get("name", ds.get("path", "")).strip()
    if not dataset:
        raise ConfigError("[dataset] needs name = simu|isimus or path = <file>")
    bench = parser["bench"] if "bench" in parser else {}
    methods = []
    for section in parser.sections():
        if not section.startswith("method"):
            continue
        # [method <name>] or [method <name> <tag>] to rerun one method
        # under different options
        parts = section[len("method") :].split()
        if not parts:
            raise ConfigError("method sections look like [method k-sbetas]")
        methods.append(
            MethodSpec(
                name=parts[0],
                options=dict(parser[section]),
                label=" ".join(parts),
            )
        )
    return BenchConfig(
        dataset=dataset,
        methods=tuple(methods),
        runs=int(bench.get("runs", 5)),
        n=int(ds.get("n", 100_000)),
        seed=int(ds.get("seed", 0)),
        labels_path=ds.get("labels", None),
        align=bench.get("align", "hungarian"),
    )


def _dataset_for_run(config: BenchConfig, run):
    """(points, labels-or-None) for one run index. Deterministic."""
    if config.dataset == "simu":
        ds = sample_dirichlet_mixture(simu_spec(n=config.n, seed=config.seed + run))
        return ds.data, ds.labels
    if config.dataset == "isimus":
        spec = make_isimus(config.seed, n=config.n)[run]
        ds = sample_dirichlet_mixture(spec)
        return ds.data, ds.labels
    X = load_predictions(config.dataset)
    labels = load_labels(config.labels_path) if config.labels_path else None
    if labels is not None and labels.shape[0] != X.shape[0]:
        raise DataError(
            f"{config.labels_path}: {labels.shape[0]} labels for {X.shape[0]} rows"
        )
    return X, labels


def _opt(options, key, default, cast):
    raw = options.get(key, default)
    if isinstance(raw, str):
        if cast is bool:
            lowered = raw.strip().lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ConfigError(f"option {key}: not a boolean: {raw!r}")
        try:
            return cast(raw)
        except ValueError:
            raise ConfigError(f"option {key}: cannot parse {raw!r}") from None
    return raw


def run_method(points, method: MethodSpec, k):
    """Fit one method once. Returns (labels, centroids, iterations, converged).

    Centroids are what alignment sees: per-coordinate density peaks for
    the density methods, the prototypes themselves for distortion methods,
    coordinate one-hots for argmax.
    """
    name = method.name
    opts = method.options
    iters = _opt(opts, "iters", 25, int)
    if name == "argmax":
        labels = argmax_baseline(points)
        return labels, vertices(points.shape[1], points.shape[1]), 1, True
    if name in DISTORTION_METHODS:
        res = distortion_kmeans(
            points,
            DistortionConfig(k=k, kind=DISTORTION_METHODS[name], max_iters=iters),
        )
        return res.labels, res.prototypes, res.n_iters, res.converged
    if name == "k-dirs":
        res = k_dirs(
            points,
            KDirsConfig(
                k=k,
                max_iters=iters,
                lambda0=_opt(opts, "lambda0", 82.5, float),
                unimodal=_opt(opts, "unimodal", True, bool),
            ),
        )
        asum = res.alphas.sum(axis=1, keepdims=True)
        if np.all(res.alphas > 1.0):
            centroids = (res.alphas - 1.0) / (asum - res.alphas.shape[1])
        else:
            centroids = res.alphas / asum
        return res.labels, centroids, res.n_iters, res.converged
    constraints = ConstraintConfig(
        tau_minus=_opt(opts, "tau_minus", 1.0, float),
        tau_plus=_opt(opts, "tau_plus", 165.0, float),
    )
    cfg = ClusterRunConfig(
        k=k,
        delta=_opt(opts, "delta", 0.15, float),
        constraints=constraints,
        max_iters=iters,
        estimator=EstimatorConfig(kind=_opt(opts, "estimator", "mom", str)),
        pi_mode=_opt(opts, "pi", "adaptive", str),
        init=_opt(opts, "init", "vertex", str),
        lambda0=_opt(opts, "lambda0", None, float),
    )
    res = fit(points, cfg)
    return res.labels, res.model.mode_vectors(), res.trace.n_iters, res.trace.converged


def _one_job(config: BenchConfig, method: MethodSpec, run):
    record = {
        "method": method.label,
        "run": run,
        "seed": config.seed + run,
        "status": "ok",
        "nmi": None,
        "accuracy": None,
        "mean_iou": None,
        "seconds": None,
        "iterations": None,
        "converged": None,
    }
    try:
        X, true = _dataset_for_run(config, run)
        n_classes = int(true.max()) + 1 if true is not None else X.shape[1]
        k = _opt(method.options, "k", n_classes, int)
        t0 = time.perf_counter()
        labels, centroids, iterations, converged = run_method(X, method, k)
        record["seconds"] = time.perf_counter() - t0
        record["iterations"] = iterations
        record["converged"] = bool(converged)
        if true is not None:
            align_how = method.options.get("align", config.align)
            if align_how == "hungarian" and k == n_classes:
                alignment = hungarian_align(centroids, n_classes)
            else:
                alignment = argmax_align(labels, true, k, n_classes)
            report = evaluate(labels, true, alignment, n_classes)
            record["nmi"] = report.nmi
            record["accuracy"] = report.accuracy
            record["mean_iou"] = report.mean_iou
    except (ConfigError, DataError):
        # broken config or unreadable data is fatal, not a method failure
        raise
    except (SBetasError, FloatingPointError) as exc:
        record["status"] = "fails"
        record["error"] = f"{type(exc).__name__}: {exc}"
    return record


def _aggregate(records):
    by_method = {}
    for rec in records:
        by_method.setdefault(rec["method"], []).append(rec)
    out = {}
    for name, recs in by_method.items():
        ok = [r for r in recs if r["status"] == "ok"]
        agg = {"runs": len(recs), "ok": len(ok), "fails": len(recs) - len(ok)}
        for key in ("nmi", "accuracy", "mean_iou", "seconds"):
            vals = [r[key] for r in ok if r[key] is not None]
            if vals:
                agg[key + "_mean"] = float(np.mean(vals))
                agg[key + "_std"] = float(np.std(vals))
        out[name] = agg
    return out


def run_bench(config: BenchConfig):
    """Execute the full matrix and return the validated report dict."""
    jobs = [
        (method, run)
        for method in config.methods
        for run in range(config.effective_runs)
    ]
    workers = int(os.environ.get(WORKERS_ENV_VAR, "1") or "1")
    if workers > 1 and jobs:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(
                pool.map(lambda mr: _one_job(config, mr[0], mr[1]), jobs)
            )
    else:
        records = [_one_job(config, method, run) for method, run in jobs]
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "sbetas", "version": __version__},
        "config": {
            "dataset": config.dataset,
            "n": config.n,
            "seed": config.seed,
            "runs": config.effective_runs,
            "align": config.align,
            "methods": [
                {"name": m.name, "options": dict(m.options)} for m in config.methods
            ],
        },
        "runs": records,
        "aggregates": _aggregate(records),
    }
    validate_report(report)
    return report


_RUN_KEYS = {
    "method": str,
    "run": int,
    "seed": int,
    "status": str,
    "seconds": (float, type(None)),
    "iterations": (int, type(None)),
    "converged": (bool, type(None)),
    "nmi": (float, type(None)),
    "accuracy": (float, type(None)),
    "mean_iou": (float, type(None)),
}


def validate_report(report):
    """Schema check run on every report emission; raises on violation."""
    if not isinstance(report, dict):
        raise DataError("report must be a dict")
    if report.get("schema_version") != SCHEMA_VERSION:
        raise DataError(f"unsupported schema_version {report.get('schema_version')!r}")
    for key in ("tool", "config", "runs", "aggregates"):
        if key not in report:
            raise DataError(f"report missing {key!r}")
    if not isinstance(report["runs"], list):
        raise DataError("report runs must be a list")
    for i, rec in enumerate(report["runs"]):
        for key, types in _RUN_KEYS.items():
            if key not in rec:
                raise DataError(f"run {i} missing {key!r}")
            if not isinstance(rec[key], types):
                raise DataError(f"run {i} field {key!r} has wrong type")
        if rec["status"] not in ("ok", "fails"):
            raise DataError(f"run {i} has unknown status {rec['status']!r}")
    if not isinstance(report["aggregates"], dict):
        raise DataError("report aggregates must be a dict")
    return report


def _fmt_pct(mean, std):
    if mean is None:
        return "-"
    if std is None:
        return f"{100 * mean:.1f}"
    return f"{100 * mean:.1f} +- {100 * std:.1f}"


def format_table(report):
    """Aligned plain-text view of the aggregates, scores in percent."""
    rows = [("method", "NMI", "Acc", "mIoU", "fit s", "runs", "status")]
    for name, agg in report["aggregates"].items():
        status = "ok" if agg["fails"] == 0 else f"{agg['fails']} fails"
        rows.append(
            (
                name,
                _fmt_pct(agg.get("nmi_mean"), agg.get("nmi_std")),
                _fmt_pct(agg.get("accuracy_mean"), agg.get("accuracy_std")),
                _fmt_pct(agg.get("mean_iou_mean"), agg.get("mean_iou_std")),
                "-" if agg.get("seconds_mean") is None else f"{agg['seconds_mean']:.3f}",
                str(agg["runs"]),
                status,
            )
        )
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
