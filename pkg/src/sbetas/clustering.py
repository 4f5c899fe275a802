"""Hard clustering of simplex points under per-cluster scaled-Beta densities.

Block-coordinate descent: points are assigned to the cluster maximizing
log proportion plus log density, proportions are refit to the counts, and
cluster parameters are re-estimated (moments or maximum likelihood) and
projected into the allowed concentration band. Clusters start as densities
peaked at distinct simplex vertices, so the first assignment needs no
parameter estimate and the whole run is deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.special import gammaln, xlogy

from .density import (
    ConstraintConfig,
    SBetaParams,
    _constrain_arrays,
    mle_estimate,
    mom_estimate,
    params_from_mode_concentration,
)
from .errors import (
    AssignmentError,
    ConfigError,
    DomainError,
    SBetasError,
    ShapeError,
)
from .simplex import as_simplex, vertices

__all__ = [
    "EstimatorConfig",
    "ClusterRunConfig",
    "ClusterModel",
    "FitTrace",
    "FitResult",
    "vertex_init",
    "assign",
    "update_proportions",
    "update_params",
    "objective",
    "fit",
]


@dataclass(frozen=True)
class EstimatorConfig:
    """Which per-cluster estimator the descent uses.

    kind "mom" is the closed-form moment inversion; "mle" runs the digamma
    fixed point for at most ``max_inner`` sweeps to tolerance ``tol``.
    """

    kind: str = "mom"
    max_inner: int = 500
    tol: float = 1e-6

    def __post_init__(self):
        if self.kind not in ("mom", "mle"):
            raise ConfigError(f"unknown estimator kind {self.kind!r}")
        if self.max_inner < 1 or self.tol <= 0:
            raise ConfigError("estimator needs max_inner >= 1 and tol > 0")


@dataclass(frozen=True)
class ClusterRunConfig:
    """Everything one clustering run depends on.

    Parameters
    ----------
    k : int
        Cluster count.
    delta : float
        Shared density scale.
    constraints : ConstraintConfig
        Concentration band enforced after every estimation step.
    max_iters : int
        Outer iteration cap.
    estimator : EstimatorConfig
    pi_mode : str
        "adaptive" refits proportions to cluster counts each iteration;
        "uniform" keeps them fixed at 1/k (the balance-prior variant).
    init : "vertex" or (k, d) array
        Initial per-coordinate density peak locations; "vertex" uses the
        first k one-hot vertices.
    lambda0 : float, optional
        Initial concentration; defaults to tau_plus / 2.
    """

    k: int
    delta: float = 0.15
    constraints: ConstraintConfig = field(default_factory=ConstraintConfig)
    max_iters: int = 25
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    pi_mode: str = "adaptive"
    init: Union[str, np.ndarray] = "vertex"
    lambda0: float | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError("k must be at least 1")
        if not np.isfinite(self.delta) or self.delta < 0:
            raise ConfigError("delta must be nonnegative and finite")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be at least 1")
        if self.pi_mode not in ("adaptive", "uniform"):
            raise ConfigError(f"unknown pi_mode {self.pi_mode!r}")
        if isinstance(self.init, str) and self.init != "vertex":
            raise ConfigError(f"unknown init {self.init!r}")
        if self.lambda0 is not None and not (
            self.constraints.tau_minus <= self.lambda0 <= self.constraints.tau_plus
        ):
            raise ConfigError("lambda0 must lie inside the constraint band")

    @property
    def initial_concentration(self):
        if self.lambda0 is not None:
            return float(self.lambda0)
        return self.constraints.tau_plus / 2.0


@dataclass
class ClusterModel:
    """K fitted densities plus mixing proportions.

    ``alpha`` and ``beta`` are (K, D) arrays; ``proportions`` is the exact
    count-based probability vector (it may contain zeros for empty
    clusters; the fit loop floors those only inside its own scoring).
    """

    alpha: np.ndarray
    beta: np.ndarray
    delta: float
    proportions: np.ndarray
    constraints: ConstraintConfig = field(default_factory=ConstraintConfig)
    pi_mode: str = "adaptive"

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        beta = np.asarray(self.beta, dtype=float)
        if alpha.ndim != 2 or alpha.shape != beta.shape:
            raise ShapeError("alpha and beta must be (K, D) arrays of equal shape")
        if np.any(alpha <= 0) or np.any(beta <= 0):
            raise DomainError("shape parameters must be positive")
        lam = alpha + beta - 2.0
        if np.any(lam < self.constraints.tau_minus) or np.any(lam > self.constraints.tau_plus):
            raise DomainError("cluster concentrations violate the constraint band")
        pi = np.asarray(self.proportions, dtype=float)
        if pi.shape != (alpha.shape[0],):
            raise ShapeError("proportions must have one entry per cluster")
        if np.any(pi < 0) or abs(pi.sum() - 1.0) > 1e-9:
            raise DomainError("proportions must be a probability vector within 1e-9")
        self.alpha = alpha
        self.beta = beta
        self.proportions = pi
        self.delta = float(self.delta)

    @property
    def k(self):
        return self.alpha.shape[0]

    @property
    def dim(self):
        return self.alpha.shape[1]

    @property
    def per_cluster(self):
        """The K per-cluster parameter bundles."""
        return [
            SBetaParams(self.alpha[j], self.beta[j], self.delta) for j in range(self.k)
        ]

    def mode_vectors(self):
        """(K, D) array of per-coordinate density peaks, the cluster centroids."""
        lam = self.alpha + self.beta - 2.0
        return (self.alpha - 1.0 + self.delta * (self.alpha - self.beta)) / lam


@dataclass
class FitTrace:
    """Objective bookkeeping around each descent step.

    Index t holds the objective under the iteration-t parameters and
    proportions: evaluated at the previous labels (``pre_assign``, NaN at
    t=0 where no labels exist yet), after the new assignment
    (``post_assign``), and after the proportion refit (``post_pi``).
    """

    pre_assign: list = field(default_factory=list)
    post_assign: list = field(default_factory=list)
    post_pi: list = field(default_factory=list)
    n_iters: int = 0
    converged: bool = False

    @property
    def objective(self):
        """Per-iteration objective values (end of iteration)."""
        return list(self.post_pi)


@dataclass
class FitResult:
    model: ClusterModel
    labels: np.ndarray
    trace: FitTrace


def vertex_init(k, d, delta=0.15, constraints=ConstraintConfig(), lambda0=None):
    """Deterministic starting model with cluster j peaked at vertex j.

    Per coordinate n of cluster j the density peak is 1 if n = j else 0,
    at a shared initial concentration ``lambda0`` (default tau_plus / 2),
    giving sharply vertex-concentrated starting densities. Proportions
    start uniform.

    Raises
    ------
    ConfigError
        If k > d (no distinct vertex per cluster) or lambda0 leaves the
        constraint band.
    """
    if k > d:
        raise ConfigError(f"vertex init needs k <= d, got k={k}, d={d}")
    lam0 = constraints.tau_plus / 2.0 if lambda0 is None else float(lambda0)
    if not (constraints.tau_minus <= lam0 <= constraints.tau_plus):
        raise ConfigError("lambda0 must lie inside the constraint band")
    modes = vertices(k, d)
    alpha, beta = params_from_mode_concentration(modes, np.full_like(modes, lam0), delta)
    return ClusterModel(
        alpha, beta, delta, np.full(k, 1.0 / k), constraints=constraints
    )


def _log_density_matrix(points, alpha, beta, delta):
    """(N, K) log densities of every point under every cluster."""
    norm = (
        gammaln(alpha)
        + gammaln(beta)
        - gammaln(alpha + beta)
        + (alpha + beta - 2.0) * np.log1p(2.0 * delta)
    ).sum(axis=1)
    if delta > 0 or (points.min() > 0.0 and points.max() < 1.0):
        lx = np.log(points + delta)
        l1x = np.log1p(delta - points)
        return lx @ (alpha - 1.0).T + l1x @ (beta - 1.0).T - norm
    # boundary values at delta = 0 need the saturating 0*log(0) handling
    out = np.empty((points.shape[0], alpha.shape[0]))
    for j in range(alpha.shape[0]):
        out[:, j] = (
            xlogy(alpha[j] - 1.0, points).sum(axis=1)
            + xlogy(beta[j] - 1.0, 1.0 - points).sum(axis=1)
            - norm[j]
        )
    return out


def _log_proportions(pi, floor=None):
    eff = pi if floor is None else np.maximum(pi, floor)
    with np.errstate(divide="ignore"):
        return np.log(eff)


def assign(points, model: ClusterModel):
    """Label every point with its highest-scoring cluster.

    The score of cluster j is ln(proportion_j) plus the log density; zero
    proportions score -inf, so dead clusters never win. Ties break to the
    lowest cluster index.

    Raises
    ------
    AssignmentError
        Naming the first point with no finite-scoring cluster.
    """
    X = as_simplex(points)
    if X.shape[1] != model.dim:
        raise ShapeError(
            f"model dimension {model.dim} does not match data dimension {X.shape[1]}"
        )
    if model.pi_mode == "uniform":
        log_pi = np.full(model.k, -np.log(model.k))
    else:
        log_pi = _log_proportions(model.proportions)
    scores = _log_density_matrix(X, model.alpha, model.beta, model.delta) + log_pi
    labels = scores.argmax(axis=1)
    best = scores[np.arange(X.shape[0]), labels]
    dead = np.isnan(best) | np.isneginf(best)
    if dead.any():
        raise AssignmentError(
            f"point {int(np.flatnonzero(dead)[0])} has no finite cluster score"
        )
    return labels


def update_proportions(labels, k):
    """Exact count-based proportions, one entry per cluster."""
    labels = np.asarray(labels)
    if labels.size == 0:
        raise DomainError("cannot compute proportions of an empty assignment")
    if labels.min() < 0 or labels.max() >= k:
        raise DomainError("labels out of range")
    return np.bincount(labels, minlength=k) / labels.size


def _reseed_empty(alpha, beta, empty, pi, cfg, d):
    """Re-peak dead clusters at the vertices the model currently covers least."""
    live = [j for j in range(alpha.shape[0]) if j not in empty]
    verts = vertices(d, d)
    if live:
        dens = _log_density_matrix(verts, alpha[live], beta[live], cfg.delta)
        log_pi = _log_proportions(pi[live], floor=1e-300)
        # total model mass near each vertex, low first
        order = np.argsort(
            np.logaddexp.reduce(dens + log_pi, axis=1), kind="stable"
        )
    else:
        order = np.arange(d)
    lam0 = cfg.initial_concentration
    for rank, j in enumerate(sorted(empty)):
        v = verts[order[rank % d]]
        a, b = params_from_mode_concentration(v, np.full(d, lam0), cfg.delta)
        alpha[j] = a
        beta[j] = b
    return alpha, beta


def _estimate_all(points, labels, cfg: ClusterRunConfig, alpha_prev, beta_prev, pi):
    """One parameter-update sweep: estimate, constrain, re-seed dead clusters."""
    k, d = alpha_prev.shape
    alpha = alpha_prev.copy()
    beta = beta_prev.copy()
    empty = []
    for j in range(k):
        members = points[labels == j]
        if members.shape[0] == 0:
            empty.append(j)
            continue
        try:
            if cfg.estimator.kind == "mom":
                est = mom_estimate(
                    members.mean(axis=0),
                    members.var(axis=0),
                    cfg.delta,
                    floor_negative=True,
                )
                a, b = est.alpha, est.beta
            else:
                a, b = mle_estimate(
                    members,
                    cfg.delta,
                    init=(alpha_prev[j], beta_prev[j]),
                    max_iters=cfg.estimator.max_inner,
                    tol=cfg.estimator.tol,
                )
        except SBetasError:
            empty.append(j)
            continue
        alpha[j], beta[j] = _constrain_arrays(
            a, b, cfg.delta, cfg.constraints.tau_minus, cfg.constraints.tau_plus
        )
    if empty:
        alpha, beta = _reseed_empty(alpha, beta, empty, pi, cfg, d)
    return alpha, beta


def update_params(points, labels, cfg: ClusterRunConfig, model: ClusterModel = None):
    """Re-estimate every cluster's parameters from its member points.

    Estimation failures and empty clusters are re-seeded at the simplex
    vertex where the model currently has the least density mass; the sweep
    never aborts a run. Maximum-likelihood estimation warm-starts from
    ``model`` (or from the vertex initialization when omitted).

    Returns
    -------
    ClusterModel
        With count-based proportions.
    """
    X = as_simplex(points)
    labels = np.asarray(labels)
    if model is None:
        model = vertex_init(
            cfg.k, X.shape[1], cfg.delta, cfg.constraints, cfg.lambda0
        )
    pi = update_proportions(labels, cfg.k)
    alpha, beta = _estimate_all(X, labels, cfg, model.alpha, model.beta, pi)
    return ClusterModel(
        alpha, beta, cfg.delta, pi, constraints=cfg.constraints, pi_mode=cfg.pi_mode
    )


def objective(points, model: ClusterModel, labels):
    """Negative total assigned score: -sum_i [ln pi_label + log density].

    The uniform-proportions variant scores every cluster at ln(1/k).
    A point labeled into a zero-proportion cluster yields +inf.
    """
    X = as_simplex(points)
    labels = np.asarray(labels)
    if labels.shape != (X.shape[0],):
        raise ShapeError("labels must have one entry per point")
    if model.pi_mode == "uniform":
        log_pi = np.full(model.k, -np.log(model.k))
    else:
        log_pi = _log_proportions(model.proportions)
    dens = _log_density_matrix(X, model.alpha, model.beta, model.delta)
    idx = np.arange(X.shape[0])
    return float(-(dens[idx, labels] + log_pi[labels]).sum())


def fit(points, cfg: ClusterRunConfig):
    """Run the full block-coordinate descent.

    Iteration t: for t >= 1 re-estimate and constrain cluster parameters
    from the previous labels, then assign every point, then refit
    proportions to the counts (skipped in uniform mode). Stops when the
    assignment vector repeats or after ``max_iters`` iterations. The trace
    records the objective around each step; proportions of emptied
    clusters are floored at 1/(10N) inside the scoring so their log stays
    finite, while the returned model carries the exact counts.

    Returns
    -------
    FitResult
        Fitted model, final labels, and the objective trace.
    """
    X = as_simplex(points)
    n, d = X.shape
    if n == 0:
        raise DomainError("cannot cluster an empty dataset")
    if n < cfg.k:
        raise DomainError(f"need at least k={cfg.k} points, got {n}")
    if isinstance(cfg.init, str):
        model0 = vertex_init(cfg.k, d, cfg.delta, cfg.constraints, cfg.lambda0)
        alpha, beta = model0.alpha.copy(), model0.beta.copy()
    else:
        modes = np.asarray(cfg.init, dtype=float)
        if modes.shape != (cfg.k, d):
            raise ConfigError(f"init modes must have shape ({cfg.k}, {d})")
        if np.any(modes < 0.0) or np.any(modes > 1.0):
            raise ConfigError("init modes must lie in [0, 1]")
        lam0 = np.full_like(modes, cfg.initial_concentration)
        alpha, beta = params_from_mode_concentration(modes, lam0, cfg.delta)
    adaptive = cfg.pi_mode == "adaptive"
    pi = np.full(cfg.k, 1.0 / cfg.k)
    floor = 1.0 / (10.0 * n)
    trace = FitTrace()
    labels_prev = None
    labels = None
    row = np.arange(n)
    for t in range(cfg.max_iters):
        if t > 0:
            alpha, beta = _estimate_all(X, labels, cfg, alpha, beta, pi)
        dens = _log_density_matrix(X, alpha, beta, cfg.delta)
        if adaptive:
            log_pi = _log_proportions(pi, floor=floor)
        else:
            log_pi = np.full(cfg.k, -np.log(cfg.k))
        scores = dens + log_pi
        if labels_prev is None:
            trace.pre_assign.append(float("nan"))
        else:
            trace.pre_assign.append(float(-scores[row, labels_prev].sum()))
        labels = scores.argmax(axis=1)
        best = scores[row, labels]
        bad = np.isnan(best) | np.isneginf(best)
        if bad.any():
            raise AssignmentError(
                f"point {int(np.flatnonzero(bad)[0])} has no finite cluster score"
            )
        trace.post_assign.append(float(-best.sum()))
        counts = np.bincount(labels, minlength=cfg.k)
        if adaptive:
            pi = counts / n
            log_pi = _log_proportions(pi, floor=floor)
        trace.post_pi.append(float(-(dens[row, labels].sum() + counts @ log_pi)))
        trace.n_iters = t + 1
        if labels_prev is not None and np.array_equal(labels, labels_prev):
            trace.converged = True
            break
        labels_prev = labels
    model = ClusterModel(
        alpha,
        beta,
        cfg.delta,
        pi if adaptive else np.full(cfg.k, 1.0 / cfg.k),
        constraints=cfg.constraints,
        pi_mode=cfg.pi_mode,
    )
    return FitResult(model=model, labels=labels, trace=trace)
