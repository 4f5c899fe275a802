"""Reference clustering methods the scaled-Beta approach is measured against.

Three families: a naive argmax labeling, prototype-based distortion
clustering (Euclidean, Manhattan, KL, Hilbert geometries), and a Dirichlet
mixture fitted by block-coordinate descent. All share the deterministic
vertex-flavored initialization and the 25-iteration budget so comparisons
isolate the geometry, not the schedule.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, xlogy

from .clustering import update_proportions
from .errors import ConfigError, ConvergenceError, DomainError, ShapeError
from .simplex import as_simplex, interior_project, vertices
from .special import digamma, inv_digamma

__all__ = [
    "DISTORTION_KINDS",
    "kl_divergence",
    "hilbert_distance",
    "DistortionConfig",
    "DistortionResult",
    "distortion_kmeans",
    "argmax_baseline",
    "dirichlet_log_pdf",
    "dirichlet_mle_from_stats",
    "dirichlet_mle",
    "KDirsConfig",
    "KDirsResult",
    "k_dirs",
]

DISTORTION_KINDS = ("euclidean", "manhattan", "kl", "hilbert")

MEB_SUBSAMPLE_CAP = 2000


def kl_divergence(x, theta):
    """Pointwise KL divergence sum_n x_n ln(x_n / theta_n), with 0 ln 0 = 0.

    ``x`` rows live on the simplex (boundary allowed); ``theta`` rows are
    projected slightly inside first so a zero prototype coordinate under a
    nonzero data coordinate yields a large finite value, never NaN.
    Accepts single vectors or (N, D) stacks; broadcasting a single theta
    against many x is supported.
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 1
    x = np.atleast_2d(x)
    theta = interior_project(np.atleast_2d(np.asarray(theta, dtype=float)))
    if theta.shape[0] == 1:
        theta = np.broadcast_to(theta, x.shape)
    if theta.shape != x.shape:
        raise ShapeError("x and theta rows must align")
    out = xlogy(x, x).sum(axis=1) - (x * np.log(theta)).sum(axis=1)
    return float(out[0]) if scalar else out


def hilbert_distance(x, theta):
    """Hilbert projective metric between two interior simplex points.

    Along the line through x and theta, each coordinate hits the simplex
    boundary at parameter t_n = x_n / (x_n - theta_n); the metric is the
    log cross-ratio of the two boundary hits, log(1 - 1/t0) - log(1 - 1/t1)
    with t0 the largest nonpositive root and t1 the smallest root >= 1.
    Symmetric, zero iff x = theta.
    """
    x = np.asarray(x, dtype=float).ravel()
    theta = np.asarray(theta, dtype=float).ravel()
    if x.shape != theta.shape:
        raise ShapeError("points must have equal dimension")
    if np.any(x <= 0) or np.any(theta <= 0):
        raise DomainError("Hilbert distance needs strictly interior points")
    diff = x - theta
    same = np.abs(diff) < 1e-300
    with np.errstate(divide="ignore"):
        t = np.where(same, np.inf, x / np.where(same, 1.0, diff))
    t0 = np.max(np.where(t <= 0, t, -np.inf))
    t1 = np.min(np.where(t >= 1, t, np.inf))
    if not np.isfinite(t0) and not np.isfinite(t1):
        return 0.0
    term0 = np.log1p(-1.0 / t0) if np.isfinite(t0) else 0.0
    term1 = np.log1p(-1.0 / t1) if np.isfinite(t1) else 0.0
    return float(term0 - term1)


def _pairwise(points, prototypes, kind):
    """(N, K) distortion matrix."""
    if kind == "euclidean":
        d = points[:, None, :] - prototypes[None, :, :]
        return np.einsum("nkd,nkd->nk", d, d)
    if kind == "manhattan":
        out = np.empty((points.shape[0], prototypes.shape[0]))
        for j in range(prototypes.shape[0]):
            out[:, j] = np.abs(points - prototypes[j]).sum(axis=1)
        return out
    if kind == "kl":
        theta = interior_project(prototypes)
        return xlogy(points, points).sum(axis=1)[:, None] - points @ np.log(theta).T
    if kind == "hilbert":
        pts = interior_project(points)
        out = np.empty((pts.shape[0], prototypes.shape[0]))
        for j in range(prototypes.shape[0]):
            out[:, j] = _hilbert_to_prototype(pts, interior_project(prototypes[j : j + 1])[0])
        return out
    raise ConfigError(f"unknown distortion {kind!r}")


def _hilbert_to_prototype(points, theta):
    """Vectorized Hilbert distance from every row of ``points`` to ``theta``."""
    diff = points - theta
    same = np.abs(diff) < 1e-300
    with np.errstate(divide="ignore"):
        t = np.where(same, np.inf, points / np.where(same, 1.0, diff))
    t0 = np.where(t <= 0, t, -np.inf).max(axis=1)
    t1 = np.where(t >= 1, t, np.inf).min(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        term0 = np.where(np.isfinite(t0), np.log1p(-1.0 / t0), 0.0)
        term1 = np.where(np.isfinite(t1), np.log1p(-1.0 / t1), 0.0)
    return term0 - term1


def _meb_prototype(members):
    """Euclidean midpoint of the Hilbert-farthest member pair, inside the simplex.

    Approximates the minimum enclosing ball center. The exact pair search
    is quadratic, so above ``MEB_SUBSAMPLE_CAP`` points it runs on an
    evenly strided subsample, keeping the sweep bounded and deterministic.
    """
    pts = members
    if pts.shape[0] > MEB_SUBSAMPLE_CAP:
        idx = np.linspace(0, pts.shape[0] - 1, MEB_SUBSAMPLE_CAP).astype(int)
        pts = pts[idx]
    inner = interior_project(pts)
    best = -1.0
    pair = (0, 0)
    for i in range(inner.shape[0] - 1):
        row = _hilbert_to_prototype(inner[i + 1 :], inner[i])
        j = int(np.argmax(row))
        if row[j] > best:
            best = float(row[j])
            pair = (i, i + 1 + j)
    mid = 0.5 * (pts[pair[0]] + pts[pair[1]])
    return interior_project(mid[None, :])[0]


def _prototype(members, kind):
    if kind in ("euclidean", "kl"):
        return members.mean(axis=0)
    if kind == "manhattan":
        med = np.median(members, axis=0)
        s = med.sum()
        if s <= 0:
            return np.full(members.shape[1], 1.0 / members.shape[1])
        return med / s
    return _meb_prototype(members)


@dataclass(frozen=True)
class DistortionConfig:
    k: int
    kind: str = "euclidean"
    max_iters: int = 25

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError("k must be at least 1")
        if self.kind not in DISTORTION_KINDS:
            raise ConfigError(f"unknown distortion {self.kind!r}")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be at least 1")


@dataclass
class DistortionResult:
    prototypes: np.ndarray
    labels: np.ndarray
    objective: list
    n_iters: int
    converged: bool


def distortion_kmeans(points, cfg: DistortionConfig):
    """Alternating-minimization clustering under a chosen distortion.

    Starts prototypes at the first k simplex vertices, then alternates:
    assign each point to its nearest prototype (ties to the lowest index),
    recompute each prototype as its cluster's distortion minimizer (mean
    for Euclidean and KL, renormalized coordinate median for Manhattan,
    approximate enclosing-ball center for Hilbert). A cluster that loses
    all members is re-seeded at the point farthest from every current
    prototype. Stops on a repeated assignment or after ``max_iters``.
    """
    X = as_simplex(points)
    n, d = X.shape
    if n < cfg.k:
        raise DomainError(f"need at least k={cfg.k} points, got {n}")
    if cfg.k > d:
        raise ConfigError(f"vertex init needs k <= d, got k={cfg.k}, d={d}")
    prototypes = vertices(cfg.k, d)
    labels_prev = None
    labels = None
    trace = []
    converged = False
    n_iters = 0
    for t in range(cfg.max_iters):
        dist = _pairwise(X, prototypes, cfg.kind)
        labels = dist.argmin(axis=1)
        row = np.arange(n)
        trace.append(float(dist[row, labels].sum()))
        n_iters = t + 1
        if labels_prev is not None and np.array_equal(labels, labels_prev):
            converged = True
            break
        new = prototypes.copy()
        empty = []
        live = np.zeros(cfg.k, dtype=bool)
        for j in range(cfg.k):
            members = X[labels == j]
            if members.shape[0] == 0:
                empty.append(j)
                continue
            new[j] = _prototype(members, cfg.kind)
            live[j] = True
        for j in empty:
            # farthest point from its nearest live prototype becomes the new seed
            far = _pairwise(X, new[live], cfg.kind).min(axis=1).argmax()
            new[j] = X[far]
            live[j] = True
        prototypes = new
        labels_prev = labels
    return DistortionResult(
        prototypes=prototypes,
        labels=labels,
        objective=trace,
        n_iters=n_iters,
        converged=converged,
    )


def argmax_baseline(points):
    """Label every point by its largest coordinate; cluster j is coordinate j.

    Only meaningful when clusters correspond to coordinates (k = d). Ties
    break to the lowest coordinate index.
    """
    X = as_simplex(points)
    return X.argmax(axis=1)


def dirichlet_log_pdf(points, alpha):
    """Dirichlet log density of interior simplex rows under concentration alpha."""
    X = np.atleast_2d(np.asarray(points, dtype=float))
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha <= 0):
        raise DomainError("Dirichlet concentrations must be positive")
    norm = gammaln(alpha).sum() - gammaln(alpha.sum())
    return np.log(X) @ (alpha - 1.0) - norm


def dirichlet_mle_from_stats(mean_log, init, max_iters=500, tol=1e-8):
    """Dirichlet fixed-point estimate from mean-log sufficient statistics.

    Iterates alpha_n <- psi_inv(psi(sum alpha) + mean_log_n) until the
    update moves less than ``tol``; the returned point satisfies the
    fixed-point residual within 10 * tol.

    Raises
    ------
    ConvergenceError
        If the iteration fails to settle, carrying the final residual.
    """
    mean_log = np.asarray(mean_log, dtype=float)
    alpha = np.asarray(init, dtype=float).copy()
    if alpha.shape != mean_log.shape or np.any(alpha <= 0):
        raise DomainError("init must be positive and match the statistic shape")
    for _ in range(max_iters):
        target = digamma(alpha.sum()) + mean_log
        new = inv_digamma(target)
        delta = np.max(np.abs(new - alpha))
        alpha = new
        if delta < tol:
            break
    residual = np.max(np.abs(digamma(alpha) - digamma(alpha.sum()) - mean_log))
    if not np.isfinite(residual) or residual > 10 * tol:
        raise ConvergenceError(
            f"Dirichlet estimate residual {residual:.3e} exceeds {10 * tol:.1e}",
            residual=residual,
            last_iterate=alpha,
        )
    return alpha


def dirichlet_mle(points, init=None, max_iters=500, tol=1e-8):
    """Maximum-likelihood Dirichlet concentration for interior simplex points."""
    X = interior_project(as_simplex(points))
    mean_log = np.log(X).mean(axis=0)
    if init is None:
        init = np.ones(X.shape[1])
    return dirichlet_mle_from_stats(mean_log, init, max_iters=max_iters, tol=tol)


@dataclass(frozen=True)
class KDirsConfig:
    """Dirichlet-mixture descent settings.

    ``unimodal`` keeps every concentration at least 1 + 1e-3 so cluster
    densities stay single-peaked; it is on by default. ``lambda0`` scales
    the vertex initialization alpha_j = 1 + lambda0 * e_j.
    """

    k: int
    max_iters: int = 25
    lambda0: float = 82.5
    unimodal: bool = True
    inner_iters: int = 500
    inner_tol: float = 1e-8

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError("k must be at least 1")
        if self.max_iters < 1 or self.inner_iters < 1:
            raise ConfigError("iteration caps must be at least 1")
        if self.lambda0 <= 0:
            raise ConfigError("lambda0 must be positive")


@dataclass
class KDirsResult:
    alphas: np.ndarray
    proportions: np.ndarray
    labels: np.ndarray
    n_iters: int
    converged: bool


UNIMODAL_FLOOR = 1.0 + 1e-3


def k_dirs(points, cfg: KDirsConfig):
    """Hard Dirichlet-mixture clustering, the strongest (and slowest) reference.

    Same block-coordinate schedule as the scaled-Beta descent: vertex-peaked
    initialization alpha_j = 1 + lambda0 * e_j, assignment by log proportion
    plus Dirichlet log density, count-based proportions, per-cluster
    maximum-likelihood refits warm-started from the previous concentrations.

    Raises
    ------
    ConvergenceError
        Propagated from a cluster refit that fails to settle; batch
        drivers catch this and record the run as failed.
    """
    X = interior_project(as_simplex(points))
    n, d = X.shape
    if n < cfg.k:
        raise DomainError(f"need at least k={cfg.k} points, got {n}")
    if cfg.k > d:
        raise ConfigError(f"vertex init needs k <= d, got k={cfg.k}, d={d}")
    lnX = np.log(X)
    alphas = 1.0 + cfg.lambda0 * vertices(cfg.k, d)
    pi = np.full(cfg.k, 1.0 / cfg.k)
    floor = 1.0 / (10.0 * n)
    labels_prev = None
    labels = None
    converged = False
    n_iters = 0
    for t in range(cfg.max_iters):
        if t > 0:
            for j in range(cfg.k):
                rows = labels == j
                if not rows.any():
                    continue
                est = dirichlet_mle_from_stats(
                    lnX[rows].mean(axis=0),
                    alphas[j],
                    max_iters=cfg.inner_iters,
                    tol=cfg.inner_tol,
                )
                if cfg.unimodal:
                    est = np.maximum(est, UNIMODAL_FLOOR)
                alphas[j] = est
        norm = gammaln(alphas).sum(axis=1) - gammaln(alphas.sum(axis=1))
        scores = lnX @ (alphas - 1.0).T - norm + np.log(np.maximum(pi, floor))
        labels = scores.argmax(axis=1)
        pi = update_proportions(labels, cfg.k)
        n_iters = t + 1
        if labels_prev is not None and np.array_equal(labels, labels_prev):
            converged = True
            break
        labels_prev = labels
    return KDirsResult(
        alphas=alphas,
        proportions=pi,
        labels=labels,
        n_iters=n_iters,
        converged=converged,
    )
