"""Session-scoped fixtures shared across the test suite.

The synthetic benchmark datasets and the fits on them are expensive at
full scale, so they are built once and reused by every test that needs
them (the acceptance suite reuses one set of fits across several
criteria).
"""
import time

import numpy as np
import pytest

from sbetas import (
    ClusterRunConfig,
    DistortionConfig,
    EstimatorConfig,
    KDirsConfig,
    argmax_baseline,
    distortion_kmeans,
    fit,
    k_dirs,
    make_isimus,
    nmi,
    sample_dirichlet_mixture,
    simu_spec,
)

SIMU_N = 100_000
SIMU_SEEDS = tuple(range(5))
ISIMUS_SEED = 100

DISTORTION_BY_NAME = {
    "k-means": "euclidean",
    "kl-k-means": "kl",
    "k-medians": "manhattan",
}


def _fit_once(points, method):
    """(labels, trace-or-None) for one method on one dataset."""
    if method == "argmax":
        return argmax_baseline(points), None
    if method in DISTORTION_BY_NAME:
        res = distortion_kmeans(
            points, DistortionConfig(k=3, kind=DISTORTION_BY_NAME[method])
        )
        return res.labels, None
    if method == "k-dirs":
        res = k_dirs(points, KDirsConfig(k=3))
        return res.labels, None
    if method == "k-sbetas":
        res = fit(points, ClusterRunConfig(k=3))
    elif method == "k-sbetas-uniform":
        res = fit(points, ClusterRunConfig(k=3, pi_mode="uniform"))
    else:
        raise ValueError(method)
    return res.labels, res.trace


@pytest.fixture(scope="session")
def simu_datasets():
    """The five seeded full-scale balanced mixtures."""
    return [
        sample_dirichlet_mixture(simu_spec(n=SIMU_N, seed=s)) for s in SIMU_SEEDS
    ]


@pytest.fixture(scope="session")
def simu_fits(simu_datasets):
    """Per-method fits on the five runs: labels, NMI (x100), traces, time."""
    methods = ("argmax", "k-means", "kl-k-means", "k-medians", "k-sbetas")
    out = {"nmi": {}, "traces": {}, "seconds": 0.0}
    t0 = time.perf_counter()
    for method in methods:
        scores = []
        traces = []
        for ds in simu_datasets:
            labels, trace = _fit_once(ds.data, method)
            scores.append(100.0 * nmi(labels, ds.labels))
            traces.append(trace)
        out["nmi"][method] = scores
        out["traces"][method] = traces
    out["seconds"] = time.perf_counter() - t0
    return out


@pytest.fixture(scope="session")
def simu_size_sweep():
    """k-sBetas and the distortion baselines at the two smaller sizes."""
    out = {}
    for n in (10_000, 1_000):
        per_method = {}
        datasets = [
            sample_dirichlet_mixture(simu_spec(n=n, seed=s)) for s in SIMU_SEEDS
        ]
        for method in ("argmax", "k-means", "kl-k-means", "k-medians", "k-sbetas"):
            scores = []
            for ds in datasets:
                labels, _ = _fit_once(ds.data, method)
                scores.append(100.0 * nmi(labels, ds.labels))
            per_method[method] = scores
        out[n] = per_method
    return out


@pytest.fixture(scope="session")
def isimus_fits():
    """The six imbalanced mixtures with the four compared methods."""
    specs = make_isimus(ISIMUS_SEED, n=SIMU_N)
    datasets = [sample_dirichlet_mixture(spec) for spec in specs]
    out = {"nmi": {}, "traces": {}}
    for method in ("k-sbetas", "k-sbetas-uniform", "k-means", "argmax"):
        scores = []
        traces = []
        for ds in datasets:
            labels, trace = _fit_once(ds.data, method)
            scores.append(100.0 * nmi(labels, ds.labels))
            traces.append(trace)
        out["nmi"][method] = scores
        out["traces"][method] = traces
    return out


@pytest.fixture(scope="session")
def simu_kdirs(simu_datasets):
    """k-Dirs on the five balanced runs."""
    scores = []
    for ds in simu_datasets:
        labels, _ = _fit_once(ds.data, "k-dirs")
        scores.append(100.0 * nmi(labels, ds.labels))
    return scores


@pytest.fixture(scope="session")
def simu_mle_fit(simu_datasets):
    """One maximum-likelihood k-sBetas fit on the first balanced run."""
    ds = simu_datasets[0]
    res = fit(ds.data, ClusterRunConfig(k=3, estimator=EstimatorConfig(kind="mle")))
    return ds, res


@pytest.fixture(scope="session")
def param_rng():
    return np.random.Generator(np.random.PCG64(20260816))
