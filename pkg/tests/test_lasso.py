import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lasszero.data import generate_orthogonal
from lasszero.lasso import (
    LambdaGrid,
    LassoConfig,
    default_grid,
    fit_lasso,
    kkt_violation,
    lasso_path,
    path_predictions,
    soft_threshold,
    standardize,
)
from lasszero.oracle import soft_threshold_oracle


def _unit_norm_instance(seed, n=60, p=10, rho=0.6):
    rng = np.random.default_rng(seed)
    base = rng.standard_normal((n, p))
    shared = rng.standard_normal((n, 1))
    X = np.sqrt(1 - rho) * base + np.sqrt(rho) * shared
    X /= np.sqrt((X**2).sum(axis=0))
    y = X @ (rng.uniform(-2, 2, p) * (rng.random(p) < 0.4)) + 0.3 * rng.standard_normal(n)
    return X, y


def test_soft_threshold_branch_values():
    assert soft_threshold(3.0, 2.0) == 1.0
    assert soft_threshold(-0.5, 2.0) == 0.0
    assert soft_threshold(-3.0, 2.0) == -1.0


@given(st.floats(-1e6, 1e6), st.floats(0, 1e6))
@settings(max_examples=200, deadline=None)
def test_soft_threshold_properties(z, t):
    out = soft_threshold(z, t)
    assert abs(out) <= abs(z)
    assert out == 0.0 or np.sign(out) == np.sign(z)
    assert abs(out - z) <= t + 1e-9 * abs(z)


def test_soft_threshold_rejects_negative_threshold():
    with pytest.raises(ValueError):
        soft_threshold(1.0, -0.1)


def test_fit_lasso_orthonormal_reference_triplet():
    # correlations (3, 1, -4) at penalty 2 shrink to (1, 0, -2)
    X = generate_orthogonal(20, 3, seed=0)
    y = X @ np.array([3.0, 1.0, -4.0])
    sol = fit_lasso(X, y, LassoConfig(lam=2.0, standardize=False))
    np.testing.assert_allclose(sol.beta, [1.0, 0.0, -2.0], atol=1e-8)


def test_fit_lasso_orthonormal_closed_form():
    for seed in range(10):
        X = generate_orthogonal(30, 8, seed)
        t = np.random.default_rng(seed).uniform(-4, 4, 8)
        y = X @ t
        lam = 1.5
        sol = fit_lasso(X, y, LassoConfig(lam=lam, standardize=False))
        np.testing.assert_allclose(sol.beta, soft_threshold_oracle(X.T @ y, lam), atol=1e-8)
        assert sol.converged


def test_fit_lasso_lambda_zero_is_ols():
    rng = np.random.default_rng(11)
    X = rng.standard_normal((40, 5))
    y = rng.standard_normal(40)
    sol = fit_lasso(X, y, LassoConfig(lam=0.0, standardize=False))
    ols = np.linalg.lstsq(X, y, rcond=None)[0]
    np.testing.assert_allclose(sol.beta, ols, atol=1e-6)


def test_fit_lasso_above_lambda_max_is_zero():
    X, y = _unit_norm_instance(12)
    lam_max = float(np.max(np.abs(X.T @ y)))
    sol = fit_lasso(X, y, LassoConfig(lam=lam_max * 1.0001, standardize=False))
    assert np.all(sol.beta == 0.0)
    # KKT at zero: every correlation is within the penalty
    assert kkt_violation(X, y, sol.beta, sol.lam) <= 1e-6


def test_fit_lasso_kkt_on_correlated_designs():
    for seed in range(8):
        X, y = _unit_norm_instance(seed)
        lam = 0.3 * float(np.max(np.abs(X.T @ y)))
        sol = fit_lasso(X, y, LassoConfig(lam=lam, standardize=False))
        assert kkt_violation(X, y, sol.beta, lam) <= 1e-6


def test_fit_lasso_objective_monotone_over_sweeps():
    X, y = _unit_norm_instance(21)
    sol = fit_lasso(X, y, LassoConfig(lam=0.01, standardize=False))
    obj = sol.sweep_objectives
    assert obj is not None and obj.size >= 1
    diffs = np.diff(obj)
    assert np.all(diffs <= 1e-12 * np.maximum(1.0, np.abs(obj[:-1])))


def test_fit_lasso_column_permutation_equivariance():
    X, y = _unit_norm_instance(31)
    perm = np.array([3, 1, 4, 0, 2, 9, 8, 7, 5, 6])
    cfg = LassoConfig(lam=0.05, standardize=False)
    sol = fit_lasso(X, y, cfg)
    sol_p = fit_lasso(X[:, perm], y, cfg)
    np.testing.assert_allclose(sol_p.beta, sol.beta[perm], atol=1e-7)


def test_fit_lasso_standardize_recovers_shifted_scale():
    rng = np.random.default_rng(41)
    X = rng.standard_normal((100, 4)) * np.array([1.0, 10.0, 0.1, 2.0]) + np.array([5.0, -3.0, 0.0, 1.0])
    beta_true = np.array([1.0, -0.5, 0.0, 0.0])
    y = 2.0 + X @ beta_true + 0.01 * rng.standard_normal(100)
    sol = fit_lasso(X, y, LassoConfig(lam=1e-4))
    preds = sol.predict(X)
    assert np.mean((preds - y) ** 2) < 1e-3
    assert abs(sol.intercept) > 0  # centering produced a real intercept


def test_fit_lasso_constant_column_never_enters():
    rng = np.random.default_rng(51)
    X = rng.standard_normal((30, 3))
    X[:, 1] = 4.2
    y = rng.standard_normal(30)
    sol = fit_lasso(X, y, LassoConfig(lam=1e-6))
    assert sol.beta[1] == 0.0


def test_fit_lasso_non_convergence_is_flagged_not_raised():
    X, y = _unit_norm_instance(61)
    sol = fit_lasso(X, y, LassoConfig(lam=1e-6, max_iters=2, standardize=False))
    assert not sol.converged
    assert np.all(np.isfinite(sol.beta))


def test_lasso_config_validation():
    with pytest.raises(ValueError):
        LassoConfig(lam=-1.0)
    with pytest.raises(ValueError):
        LassoConfig(lam=0.0, max_iters=0)
    with pytest.raises(ValueError):
        LassoConfig(lam=0.0, coef_tol=0.0)


def test_lambda_grid_validation():
    with pytest.raises(ValueError):
        LambdaGrid(())
    with pytest.raises(ValueError):
        LambdaGrid((1.0, 1.0))
    with pytest.raises(ValueError):
        LambdaGrid((1.0, 2.0))
    with pytest.raises(ValueError):
        LambdaGrid((1.0, 0.0))
    grid = LambdaGrid.from_values([0.1, 1.0, 0.5])
    assert grid.values == (1.0, 0.5, 0.1)


def test_default_grid_shape_and_range():
    X, y = _unit_norm_instance(71)
    grid = default_grid(X, y, n_values=25, min_ratio=1e-2, standardize_data=False)
    assert len(grid) == 25
    lam_max = float(np.max(np.abs(X.T @ y)))
    assert np.isclose(grid[0], lam_max)
    assert np.isclose(grid[len(grid) - 1], lam_max * 1e-2)


def test_default_grid_rejects_zero_signal():
    X = np.random.default_rng(0).standard_normal((10, 3))
    with pytest.raises(ValueError):
        default_grid(X, np.zeros(10))


def test_lasso_path_single_value_matches_fit():
    X, y = _unit_norm_instance(81)
    lam = 0.1
    cfg = LassoConfig(lam=lam, standardize=False)
    path = lasso_path(X, y, LambdaGrid((lam,)), cfg)
    assert len(path) == 1
    np.testing.assert_allclose(path[0].beta, fit_lasso(X, y, cfg).beta, atol=1e-10)


def test_lasso_path_at_lambda_max_is_zero():
    X, y = _unit_norm_instance(91)
    lam_max = float(np.max(np.abs(X.T @ y)))
    path = lasso_path(X, y, LambdaGrid((lam_max,)), LassoConfig(lam=1.0, standardize=False))
    assert np.all(path[0].beta == 0.0)


def test_lasso_path_support_grows_on_orthogonal_designs():
    X = generate_orthogonal(40, 8, seed=5)
    y = X @ np.random.default_rng(5).uniform(-4, 4, 8)
    grid = default_grid(X, y, n_values=12, min_ratio=1e-2, standardize_data=False)
    path = lasso_path(X, y, grid, LassoConfig(lam=1.0, standardize=False))
    sizes = [len(s.support) for s in path]
    assert all(a <= b for a, b in zip(sizes, sizes[1:]))
    for lam, sol in zip(grid, path):
        np.testing.assert_allclose(sol.beta, soft_threshold_oracle(X.T @ y, lam), atol=1e-8)


def test_path_predictions_match_solution_predictions():
    X, y = _unit_norm_instance(99)
    grid = default_grid(X, y, n_values=8, min_ratio=0.05)
    cfg = LassoConfig(lam=1.0)
    preds = path_predictions(X[:40], y[:40], X[40:], grid, cfg)
    sols = lasso_path(X[:40], y[:40], grid, cfg)
    for gi, sol in enumerate(sols):
        np.testing.assert_allclose(preds[gi], sol.predict(X[40:]), atol=1e-9)


def test_standardize_centers_and_scales():
    rng = np.random.default_rng(101)
    X = rng.standard_normal((50, 4)) * 3 + 1
    y = rng.standard_normal(50) + 2
    Xs, ys, x_mean, y_mean, scale = standardize(X, y)
    np.testing.assert_allclose(Xs.sum(axis=0), 0.0, atol=1e-10)
    np.testing.assert_allclose((Xs**2).sum(axis=0), 1.0, rtol=1e-12)
    assert abs(ys.mean()) < 1e-12
    np.testing.assert_allclose(Xs * scale + x_mean, X, rtol=1e-12)
