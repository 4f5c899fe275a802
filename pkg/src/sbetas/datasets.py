"""Synthetic simplex datasets and on-disk interchange formats.

The synthetic benchmark is a three-component Dirichlet mixture on the
2-simplex, balanced ("simu") or reweighted through all six permutations of
(0.75, 0.2, 0.05) ("isimus"). Sampling is pinned to numpy's PCG64 stream
so a (spec, seed) pair reproduces bit-identical data on any platform.

Two file formats: CSV (UTF-8, comma-delimited, '.' decimal point,
newline-terminated rows, optional single header) and a packed binary
layout (magic "SPXD", little-endian u32 row count, u32 dimension, then
row-major little-endian f32 values). Labels travel in a sidecar text file,
one integer per line.
"""
from __future__ import annotations

import io
import itertools
import struct
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError, DomainError, ShapeError
from .simplex import as_simplex

__all__ = [
    "DirichletSpec",
    "LabeledSimplexDataset",
    "SIMU_ALPHAS",
    "ISIMUS_WEIGHTS",
    "simu_spec",
    "make_isimus",
    "sample_dirichlet_mixture",
    "save_csv",
    "load_csv",
    "save_spxd",
    "load_spxd",
    "load_predictions",
    "save_labels",
    "load_labels",
    "downsample_rows",
]

SIMU_ALPHAS = ((1.0, 1.0, 5.0), (25.0, 5.0, 5.0), (5.0, 7.0, 5.0))
ISIMUS_WEIGHTS = (0.75, 0.2, 0.05)

SPXD_MAGIC = b"SPXD"


@dataclass(frozen=True)
class DirichletSpec:
    """A finite Dirichlet mixture plus sampling size and seed."""

    alphas: tuple
    weights: tuple
    n: int
    seed: int

    def __post_init__(self):
        alphas = tuple(tuple(float(v) for v in a) for a in self.alphas)
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "weights", weights)
        if len(alphas) != len(weights) or not alphas:
            raise ConfigError("need one weight per component")
        dims = {len(a) for a in alphas}
        if len(dims) != 1:
            raise ConfigError("all components must share a dimension")
        if any(v <= 0 for a in alphas for v in a):
            raise ConfigError("Dirichlet parameters must be positive")
        if any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-9:
            raise ConfigError("weights must form a probability vector")
        if self.n < 0:
            raise ConfigError("sample count must be nonnegative")

    @property
    def k(self):
        return len(self.alphas)

    @property
    def dim(self):
        return len(self.alphas[0])


@dataclass
class LabeledSimplexDataset:
    data: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        if self.labels.shape != (self.data.shape[0],):
            raise ShapeError("need one label per row")


def simu_spec(n=100_000, seed=0):
    """The balanced three-component benchmark mixture on the 2-simplex."""
    return DirichletSpec(alphas=SIMU_ALPHAS, weights=(1 / 3, 1 / 3, 1 / 3), n=n, seed=seed)


def make_isimus(seed, n=100_000):
    """The six imbalanced variants: every permutation of the weights
    (0.75, 0.2, 0.05) over the three benchmark components, seeded
    consecutively from ``seed``."""
    specs = []
    for i, w in enumerate(itertools.permutations(ISIMUS_WEIGHTS)):
        specs.append(DirichletSpec(alphas=SIMU_ALPHAS, weights=w, n=n, seed=seed + i))
    return specs


def sample_dirichlet_mixture(spec: DirichletSpec):
    """Draw the mixture: component per point by weight, then a Dirichlet
    draw as normalized Gamma variates, all from one PCG64 stream.

    Rows are renormalized to satisfy the simplex invariant exactly.
    Deterministic: the same ``DirichletSpec`` always yields the same data.
    """
    gen = np.random.Generator(np.random.PCG64(spec.seed))
    cum = np.cumsum(spec.weights)
    cum[-1] = 1.0
    labels = np.searchsorted(cum, gen.random(spec.n), side="right")
    X = np.empty((spec.n, spec.dim))
    for j, a in enumerate(spec.alphas):
        m = labels == j
        g = gen.standard_gamma(np.asarray(a, float), size=(int(m.sum()), spec.dim))
        X[m] = g
    if spec.n:
        X /= X.sum(axis=1, keepdims=True)
        X = as_simplex(X)
    return LabeledSimplexDataset(data=X, labels=labels.astype(int))


def save_csv(path, points, header=None):
    """Write rows as comma-separated decimals with full float64 precision."""
    X = np.asarray(points, dtype=float)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header:
            fh.write(",".join(header) + "\n")
        for row in X:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")


def _parse_csv(fh, path):
    rows = []
    width = None
    for lineno, line in enumerate(fh, start=1):
        line = line.strip()
        if not line:
            continue
        fields = line.split(",")
        if lineno == 1:
            # single non-numeric header row is allowed and skipped
            try:
                [float(f) for f in fields]
            except ValueError:
                continue
        try:
            row = [float(f) for f in fields]
        except ValueError as exc:
            raise DataError(f"{path}: line {lineno}: {exc}") from None
        if not all(np.isfinite(row)):
            raise DataError(f"{path}: line {lineno}: non-finite value")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise DataError(
                f"{path}: line {lineno}: expected {width} fields, got {len(row)}"
            )
        rows.append(row)
    if not rows:
        raise DataError(f"{path}: no data rows")
    return np.asarray(rows, dtype=float)


def load_csv(path):
    """Read a CSV written by :func:`save_csv` (or any compatible file).

    A single leading header row is detected by failing to parse as
    numbers and skipped. Malformed rows raise a data error naming the
    line number. No simplex validation here; see :func:`load_predictions`.
    """
    with open(path, "r", encoding="utf-8") as fh:
        return _parse_csv(fh, path)


def save_spxd(path, points):
    """Write the packed binary layout: b"SPXD", u32 N, u32 D, N*D f32 LE."""
    X = np.ascontiguousarray(points, dtype="<f4")
    if X.ndim != 2:
        raise ShapeError("points must be a 2-D array")
    with open(path, "wb") as fh:
        fh.write(SPXD_MAGIC)
        fh.write(struct.pack("<II", X.shape[0], X.shape[1]))
        fh.write(X.tobytes(order="C"))


def load_spxd(path):
    with open(path, "rb") as fh:
        head = fh.read(4)
        if head != SPXD_MAGIC:
            raise DataError(f"{path}: bad magic {head!r}, expected {SPXD_MAGIC!r}")
        meta = fh.read(8)
        if len(meta) != 8:
            raise DataError(f"{path}: truncated header")
        n, d = struct.unpack("<II", meta)
        body = fh.read()
    expected = n * d * 4
    if len(body) != expected:
        raise DataError(
            f"{path}: expected {expected} payload bytes for {n}x{d}, got {len(body)}"
        )
    return np.frombuffer(body, dtype="<f4").astype(float).reshape(n, d)


def load_predictions(path, fmt=None, tol=1e-5):
    """Ingest an external prediction file as validated simplex rows.

    ``fmt`` is "csv", "spxd", or None to sniff the binary magic. Rows
    violating the simplex constraints beyond ``tol`` are rejected with
    their index; otherwise rows are renormalized exactly.
    """
    if fmt is None:
        with open(path, "rb") as fh:
            fmt = "spxd" if fh.read(4) == SPXD_MAGIC else "csv"
    if fmt == "spxd":
        raw = load_spxd(path)
    elif fmt == "csv":
        raw = load_csv(path)
    else:
        raise ConfigError(f"unknown prediction format {fmt!r}")
    try:
        return as_simplex(raw, tol=tol)
    except (DomainError, ShapeError) as exc:
        raise DataError(f"{path}: {exc}") from None


def save_labels(path, labels):
    """One integer per line, aligned with the data rows."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for v in np.asarray(labels).astype(int):
            fh.write(f"{v}\n")


def load_labels(path):
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(int(line))
            except ValueError as exc:
                raise DataError(f"{path}: line {lineno}: {exc}") from None
    if not out:
        raise DataError(f"{path}: no labels")
    return np.asarray(out, dtype=int)


def downsample_rows(grid, factor):
    """Keep every ``factor``-th probability vector along both grid axes.

    ``grid`` is an (H, W, D) array of probability vectors arranged on an
    image grid. factor=1 returns the values unchanged in the same order.
    Fitting on the strided subset and assigning the full set is the
    caller's composition.
    """
    arr = np.asarray(grid, dtype=float)
    if arr.ndim != 3:
        raise ShapeError("grid must be (H, W, D)")
    f = int(factor)
    if f != factor or f < 1:
        raise ConfigError("factor must be an integer >= 1")
    return arr[::f, ::f].copy()
