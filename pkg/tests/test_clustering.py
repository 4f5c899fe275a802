"""Block-coordinate descent: initialization, steps, full fits."""
import numpy as np
import pytest

from sbetas import (
    AssignmentError,
    ClusterModel,
    ClusterRunConfig,
    ConfigError,
    ConstraintConfig,
    DomainError,
    EstimatorConfig,
    SBetaParams,
    ShapeError,
    assign,
    concentration,
    fit,
    mle_estimate,
    mode,
    objective,
    params_from_mode_concentration,
    sample_dirichlet_mixture,
    simu_spec,
    update_params,
    update_proportions,
    vertex_init,
)


def _toy_data(n=400, seed=0):
    return sample_dirichlet_mixture(simu_spec(n=n, seed=seed))


def _two_cluster_model(m0, m1, lam=40.0, delta=0.15, pi=(0.5, 0.5)):
    a0, b0 = params_from_mode_concentration(np.asarray(m0), np.full(len(m0), lam), delta)
    a1, b1 = params_from_mode_concentration(np.asarray(m1), np.full(len(m1), lam), delta)
    return ClusterModel(
        np.stack([a0, a1]), np.stack([b0, b1]), delta, np.asarray(pi, dtype=float)
    )


def test_vertex_init_modes_are_vertices():
    model = vertex_init(3, 3)
    modes = model.mode_vectors()
    np.testing.assert_allclose(modes, np.eye(3), atol=1e-10)
    np.testing.assert_array_equal(model.proportions, np.full(3, 1 / 3))
    lam = model.alpha + model.beta - 2.0
    np.testing.assert_allclose(lam, 82.5, rtol=1e-12)


def test_vertex_init_bitwise_deterministic():
    m1 = vertex_init(3, 5, 0.15)
    m2 = vertex_init(3, 5, 0.15)
    assert np.array_equal(m1.alpha, m2.alpha)
    assert np.array_equal(m1.beta, m2.beta)


def test_vertex_init_too_many_clusters():
    with pytest.raises(ConfigError):
        vertex_init(4, 3)


def test_vertex_init_lambda0_out_of_band():
    with pytest.raises(ConfigError):
        vertex_init(2, 3, lambda0=0.5)


def test_cluster_model_validation():
    good = vertex_init(2, 3)
    with pytest.raises(DomainError):
        ClusterModel(good.alpha, good.beta, 0.15, np.array([0.9, 0.2]))
    with pytest.raises(DomainError):
        # concentration below the default band
        ClusterModel(
            np.array([[1.1, 1.1]]), np.array([[1.1, 1.1]]), 0.0, np.array([1.0])
        )
    with pytest.raises(ShapeError):
        ClusterModel(good.alpha, good.beta[:1], 0.15, np.array([0.5, 0.5]))


def test_assign_single_cluster():
    model = vertex_init(1, 3)
    labels = assign(_toy_data().data, model)
    assert np.all(labels == 0)


def test_assign_mirrored_pair_prefers_nearer_mode():
    model = _two_cluster_model([0.8, 0.2], [0.2, 0.8])
    labels = assign(np.array([[0.9, 0.1], [0.1, 0.9]]), model)
    np.testing.assert_array_equal(labels, [0, 1])


def test_assign_zero_proportion_cluster_never_wins():
    model = _two_cluster_model([0.2, 0.8], [0.8, 0.2], pi=(1.0, 0.0))
    labels = assign(np.array([[0.9, 0.1], [0.5, 0.5], [0.05, 0.95]]), model)
    # cluster 1 would win on density for the first point, but ln 0 = -inf
    np.testing.assert_array_equal(labels, [0, 0, 0])


def test_assign_tie_breaks_to_lowest_index():
    a, b = params_from_mode_concentration(np.array([0.5, 0.5]), np.full(2, 40.0), 0.15)
    model = ClusterModel(
        np.stack([a, a]), np.stack([b, b]), 0.15, np.array([0.5, 0.5])
    )
    labels = assign(np.array([[0.3, 0.7], [0.6, 0.4]]), model)
    np.testing.assert_array_equal(labels, [0, 0])


def test_assign_dimension_mismatch():
    model = vertex_init(2, 3)
    with pytest.raises(ShapeError):
        assign(np.array([[0.5, 0.5]]), model)


def test_assign_no_finite_score_names_point():
    # at delta=0 a boundary point has -inf density under every smooth cluster
    a = np.full((2, 3), 2.0)
    model = ClusterModel(a, a, 0.0, np.array([0.5, 0.5]))
    with pytest.raises(AssignmentError, match="point 1"):
        assign(np.array([[0.2, 0.4, 0.4], [1.0, 0.0, 0.0]]), model)


def test_update_proportions_counts():
    np.testing.assert_array_equal(update_proportions([0, 0, 1, 1], 2), [0.5, 0.5])
    np.testing.assert_array_equal(update_proportions([0, 0, 0, 1], 2), [0.75, 0.25])
    np.testing.assert_array_equal(update_proportions([0, 0], 2), [1.0, 0.0])
    with pytest.raises(DomainError):
        update_proportions([0, 2], 2)
    with pytest.raises(DomainError):
        update_proportions([], 2)


def test_update_params_mom_recovers_reference_pair():
    # two points per coordinate realize the exact analytic mean/variance
    mu0, v = 0.175, 0.024375
    sd = np.sqrt(v)
    col0 = np.array([mu0 - sd, mu0 + sd])
    points = np.column_stack([col0, 1.0 - col0])
    cfg = ClusterRunConfig(k=1, delta=0.15)
    model = update_params(points, np.zeros(2, dtype=int), cfg)
    np.testing.assert_allclose(model.alpha[0, 0], 3.0, rtol=1e-9)
    np.testing.assert_allclose(model.beta[0, 0], 9.0, rtol=1e-9)
    np.testing.assert_allclose(model.alpha[0, 1], 9.0, rtol=1e-9)
    np.testing.assert_allclose(model.beta[0, 1], 3.0, rtol=1e-9)


def test_update_params_identical_members_capped_at_mode():
    points = np.tile([0.2, 0.3, 0.5], (10, 1))
    cfg = ClusterRunConfig(k=1)
    model = update_params(points, np.zeros(10, dtype=int), cfg)
    lam = model.alpha[0] + model.beta[0] - 2.0
    np.testing.assert_allclose(lam, 165.0, rtol=1e-12)
    np.testing.assert_allclose(model.mode_vectors()[0], [0.2, 0.3, 0.5], atol=1e-8)


def test_update_params_mom_and_mle_agree():
    ds = sample_dirichlet_mixture(simu_spec(n=10_000, seed=3))
    members = ds.data[ds.labels == 1]
    labels = np.zeros(members.shape[0], dtype=int)
    mom_model = update_params(members, labels, ClusterRunConfig(k=1))
    mle_model = update_params(
        members, labels, ClusterRunConfig(k=1, estimator=EstimatorConfig(kind="mle"))
    )
    np.testing.assert_allclose(mom_model.alpha, mle_model.alpha, rtol=0.05)
    np.testing.assert_allclose(mom_model.beta, mle_model.beta, rtol=0.05)


def test_update_params_empty_cluster_reseeded_not_fatal():
    ds = _toy_data()
    labels = np.zeros(ds.data.shape[0], dtype=int)
    labels[:10] = 1
    cfg = ClusterRunConfig(k=3)
    model = update_params(ds.data, labels, cfg)
    assert model.proportions[2] == 0.0
    lam2 = model.alpha[2] + model.beta[2] - 2.0
    np.testing.assert_allclose(lam2, cfg.initial_concentration, rtol=1e-12)


def test_objective_uniform_density_is_zero():
    alpha = np.ones((1, 2))
    beta = np.ones((1, 2))
    model = ClusterModel(
        alpha, beta, 0.0, np.array([1.0]), constraints=ConstraintConfig(tau_minus=0.0)
    )
    X = np.array([[0.3, 0.7], [0.6, 0.4]])
    assert objective(X, model, np.zeros(2, dtype=int)) == 0.0


def test_objective_assign_step_never_increases():
    ds = _toy_data(seed=5)
    model = vertex_init(3, 3)
    rng = np.random.Generator(np.random.PCG64(6))
    random_labels = rng.integers(0, 3, ds.data.shape[0])
    best_labels = assign(ds.data, model)
    assert objective(ds.data, model, best_labels) <= objective(
        ds.data, model, random_labels
    )


def test_objective_pi_step_never_increases():
    ds = _toy_data(seed=7)
    base = vertex_init(3, 3)
    labels = assign(ds.data, base)
    pi_new = update_proportions(labels, 3)
    updated = ClusterModel(base.alpha, base.beta, base.delta, pi_new)
    assert objective(ds.data, updated, labels) <= objective(ds.data, base, labels)


def test_objective_label_permutation_symmetry():
    ds = _toy_data(seed=8)
    model = vertex_init(3, 3)
    labels = assign(ds.data, model)
    perm = np.array([2, 0, 1])
    inverse = np.argsort(perm)
    permuted = ClusterModel(
        model.alpha[perm], model.beta[perm], model.delta, model.proportions[perm]
    )
    assert objective(ds.data, model, labels) == pytest.approx(
        objective(ds.data, permuted, inverse[labels]), rel=1e-12
    )


def test_objective_uniform_mode_uses_log_k():
    ds = _toy_data(seed=9)
    model = vertex_init(3, 3)
    labels = assign(ds.data, model)
    uniform = ClusterModel(
        model.alpha,
        model.beta,
        model.delta,
        np.array([0.2, 0.3, 0.5]),
        pi_mode="uniform",
    )
    balanced = ClusterModel(
        model.alpha, model.beta, model.delta, np.full(3, 1 / 3)
    )
    assert objective(ds.data, uniform, labels) == pytest.approx(
        objective(ds.data, balanced, labels), rel=1e-12
    )


def test_fit_single_cluster_converges_fast():
    ds = _toy_data()
    res = fit(ds.data, ClusterRunConfig(k=1))
    assert np.all(res.labels == 0)
    assert res.trace.converged
    assert res.trace.n_iters <= 2


def test_fit_deterministic():
    ds = _toy_data(n=2000, seed=1)
    r1 = fit(ds.data, ClusterRunConfig(k=3))
    r2 = fit(ds.data, ClusterRunConfig(k=3))
    assert np.array_equal(r1.labels, r2.labels)
    assert np.array_equal(r1.model.alpha, r2.model.alpha)
    assert r1.trace.post_pi == r2.trace.post_pi


def test_fit_row_permutation_equivariance():
    ds = _toy_data(n=2000, seed=2)
    rng = np.random.Generator(np.random.PCG64(3))
    perm = rng.permutation(ds.data.shape[0])
    r_base = fit(ds.data, ClusterRunConfig(k=3))
    r_perm = fit(ds.data[perm], ClusterRunConfig(k=3))
    np.testing.assert_array_equal(r_perm.labels, r_base.labels[perm])
    np.testing.assert_allclose(r_perm.model.alpha, r_base.model.alpha, atol=1e-10)
    np.testing.assert_allclose(r_perm.model.beta, r_base.model.beta, atol=1e-10)


def test_fit_uniform_pi_close_to_adaptive_on_balanced_data():
    ds = _toy_data(n=10_000, seed=4)
    adaptive = fit(ds.data, ClusterRunConfig(k=3))
    uniform = fit(ds.data, ClusterRunConfig(k=3, pi_mode="uniform"))
    agreement = np.mean(adaptive.labels == uniform.labels)
    assert agreement >= 0.99


def test_fit_trace_records_every_iteration():
    ds = _toy_data(n=2000, seed=6)
    res = fit(ds.data, ClusterRunConfig(k=3, max_iters=7))
    t = res.trace
    assert len(t.post_pi) == t.n_iters <= 7
    assert len(t.pre_assign) == len(t.post_assign) == len(t.post_pi)
    assert np.isnan(t.pre_assign[0])
    assert t.objective == t.post_pi


def test_fit_mle_estimator_runs():
    ds = _toy_data(n=3000, seed=8)
    res = fit(ds.data, ClusterRunConfig(k=3, estimator=EstimatorConfig(kind="mle")))
    assert res.model.alpha.shape == (3, 3)
    assert len(np.unique(res.labels)) == 3


def test_fit_rejects_bad_input():
    with pytest.raises(DomainError):
        fit(np.empty((0, 3)), ClusterRunConfig(k=2))
    with pytest.raises(DomainError):
        fit(np.array([[0.5, 0.5]]), ClusterRunConfig(k=2))


def test_fit_with_provided_mode_init():
    ds = _toy_data(n=2000, seed=9)
    modes = np.array([[0.1, 0.1, 0.8], [0.7, 0.15, 0.15], [0.3, 0.4, 0.3]])
    res = fit(ds.data, ClusterRunConfig(k=3, init=modes))
    assert res.model.alpha.shape == (3, 3)
    with pytest.raises(ConfigError):
        fit(ds.data, ClusterRunConfig(k=3, init=np.full((3, 3), 1.5)))


def test_config_validation():
    with pytest.raises(ConfigError):
        ClusterRunConfig(k=0)
    with pytest.raises(ConfigError):
        ClusterRunConfig(k=2, pi_mode="soft")
    with pytest.raises(ConfigError):
        ClusterRunConfig(k=2, estimator=EstimatorConfig(kind="map"))
    with pytest.raises(ConfigError):
        ClusterRunConfig(k=2, lambda0=500.0)
    with pytest.raises(ConfigError):
        ClusterRunConfig(k=2, init="random")


def test_k_equals_n_allowed():
    X = np.array([[0.9, 0.05, 0.05], [0.05, 0.9, 0.05], [0.05, 0.05, 0.9]])
    res = fit(X, ClusterRunConfig(k=3))
    assert sorted(res.labels.tolist()) == [0, 1, 2]
