import numpy as np
import pytest

from lasszero.data import SyntheticSpec, generate_orthogonal, generate_synthetic, inject_collinear
from lasszero.lass0 import (
    Lass0Config,
    improving_step,
    l0_objective,
    lass0_fit,
    lass0_pipeline,
    pipeline_solutions,
)
from lasszero.lasso import LassoConfig, standardize
from lasszero.linalg import restricted_ols
from lasszero.oracle import exhaustive_l0, hard_threshold_oracle
from lasszero.types import SupportSet


def test_l0_objective_values():
    X = np.eye(2)
    assert l0_objective(X, [3.0, 4.0], [0.0, 0.0], lam=7.0) == 12.5
    X3 = np.eye(3)
    assert l0_objective(X3, [1.0, 2.0, 0.0], [1.0, 2.0, 0.0], lam=3.0) == 6.0
    assert l0_objective(X, [2.0, 0.0], [2.0, 0.0], lam=1.0) == 1.0


def test_l0_objective_counts_exact_nonzeros():
    X = np.eye(3)
    assert l0_objective(X, np.zeros(3), [0.0, 1e-300, 0.0], lam=5.0) == pytest.approx(5.0)


def test_l0_objective_errors():
    with pytest.raises(ValueError):
        l0_objective(np.eye(2), [1.0], [0.0, 0.0], lam=1.0)
    with pytest.raises(ValueError):
        l0_objective(np.eye(2), [1.0, 2.0], [0.0, 0.0], lam=-1.0)


def test_lass0_identity_design_removal_regime():
    # threshold sqrt(2*lam) = 2: only the coordinate at 3 survives
    X = np.eye(3)
    y = np.array([3.0, 1.0, 0.5])
    sol, trace = lass0_fit(X, y, np.array([1.0, 0.0, 0.0]), Lass0Config(lam=2.0))
    np.testing.assert_allclose(sol.beta, [3.0, 0.0, 0.0], atol=1e-12)
    assert sol.converged
    # global check by enumeration
    assert sol.objective == pytest.approx(exhaustive_l0(X, y, 2.0).objective, abs=1e-12)


def test_lass0_identity_design_keeps_two():
    # threshold sqrt(2*0.5) = 1: coordinates at 3 and 1.2 survive
    X = np.eye(3)
    y = np.array([3.0, 1.2, 0.5])
    init = np.array([2.5, 0.7, 0.0])  # soft-threshold shape, exact value irrelevant
    sol, _ = lass0_fit(X, y, init, Lass0Config(lam=0.5))
    np.testing.assert_allclose(sol.beta, [3.0, 1.2, 0.0], atol=1e-12)
    assert sol.objective == pytest.approx(exhaustive_l0(X, y, 0.5).objective, abs=1e-12)


def test_lass0_empty_init_stays_empty_when_no_feature_pays():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((30, 6))
    y = rng.standard_normal(30)
    gains = 0.5 * (X.T @ y) ** 2 / np.einsum("ij,ij->j", X, X)
    lam = float(gains.max()) * 1.01
    sol, trace = lass0_fit(X, y, SupportSet.from_iterable([], 6), Lass0Config(lam=lam))
    assert len(sol.support) == 0 and len(trace) == 0 and sol.converged


def test_lass0_empty_init_adds_when_it_pays():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((30, 6))
    y = rng.standard_normal(30)
    gains = 0.5 * (X.T @ y) ** 2 / np.einsum("ij,ij->j", X, X)
    lam = float(gains.max()) * 0.9
    sol, trace = lass0_fit(X, y, SupportSet.from_iterable([], 6), Lass0Config(lam=lam))
    assert len(sol.support) >= 1
    assert trace.is_add[0] and trace.index[0] == int(np.argmax(gains))


def test_lass0_collinear_pair_never_both_active():
    for seed, k in [(0, 1.0), (1, -2.0), (2, 0.5)]:
        rng = np.random.default_rng(seed)
        X = inject_collinear(rng.standard_normal((40, 6)), 0, 1, k)
        y = X @ np.array([0.0, 1.0, 0.0, 0.7, 0.0, 0.0]) + 0.2 * rng.standard_normal(40)
        init = SupportSet.from_iterable([0, 1, 3], 6)
        sol, _ = lass0_fit(X, y, init, Lass0Config(lam=0.5))
        assert not (0 in sol.support and 1 in sol.support)


def test_lass0_trace_strictly_decreasing():
    inst = generate_synthetic(SyntheticSpec(n=80, p=12, sparsity=4, seed=3))
    Xs, ys, *_ = standardize(inst.X, inst.y)
    lam = 0.05 * float(np.max(np.abs(Xs.T @ ys)))
    cfg = Lass0Config(lam=lam)
    sol, trace = lass0_fit(Xs, ys, SupportSet.from_iterable([], 12), cfg)
    assert np.all(trace.improvements() >= cfg.min_improvement)
    # consecutive rows chain together
    if len(trace) > 1:
        np.testing.assert_allclose(
            trace.objective_after[:-1], trace.objective_before[1:], atol=1e-9
        )


def test_lass0_local_optimality_certificate():
    for seed in range(5):
        inst = generate_synthetic(SyntheticSpec(n=60, p=10, sparsity=3, seed=seed))
        Xs, ys, *_ = standardize(inst.X, inst.y)
        lam = 0.1 * float(np.max(np.abs(Xs.T @ ys)))
        cfg = Lass0Config(lam=lam)
        res = pipeline_solutions(Xs, ys, lam, cfg, LassoConfig(lam=lam, standardize=False))
        assert improving_step(Xs, ys, res.lass0, cfg) is None


def test_lass0_never_beats_enumeration_and_dominates_init():
    for seed in range(10):
        inst = generate_synthetic(SyntheticSpec(n=60, p=10, sparsity=3, rho=0.7, seed=seed))
        Xs, ys, *_ = standardize(inst.X, inst.y)
        lam = 0.1 * float(np.max(np.abs(Xs.T @ ys)))
        res = pipeline_solutions(Xs, ys, lam, lasso_cfg=LassoConfig(lam=lam, standardize=False))
        ex = exhaustive_l0(Xs, ys, lam)
        assert res.lass0.objective >= ex.objective - 1e-10
        assert res.lass0.objective <= res.polished_objective + 1e-12


def test_lass0_orthogonal_equals_enumeration():
    X = generate_orthogonal(20, 8, seed=9)
    y = X @ np.random.default_rng(9).uniform(-4, 4, 8)
    lam = 1.0
    res = lass0_pipeline(X, y, lam, lasso_cfg=LassoConfig(lam=lam, standardize=False))
    ex = exhaustive_l0(X, y, lam)
    assert res.objective == pytest.approx(ex.objective, abs=1e-10)


def test_lass0_max_steps_flags_non_convergence():
    X = np.eye(4)
    y = np.array([3.0, 3.0, 3.0, 3.0])
    sol, trace = lass0_fit(X, y, SupportSet.from_iterable([], 4), Lass0Config(lam=0.5, max_steps=2))
    assert not sol.converged
    assert len(trace) == 2


def test_lass0_deficient_init_slow_path_then_fast():
    rng = np.random.default_rng(13)
    X = inject_collinear(rng.standard_normal((50, 8)), 0, 1, -2.0)
    y = X @ np.array([1.0, 0.5, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]) + 0.1 * rng.standard_normal(50)
    init = SupportSet.from_iterable([0, 1, 3, 4], 8)
    sol, trace = lass0_fit(X, y, init, Lass0Config(lam=1.0))
    assert not (0 in sol.support and 1 in sol.support)
    assert sol.converged
    assert np.all(trace.improvements() >= 1e-10)
    assert improving_step(X, y, sol, Lass0Config(lam=1.0)) is None


def test_pipeline_orthonormal_matches_hard_threshold_all_regimes():
    for lam in (0.5, 2.0, 5.0):
        for seed in range(5):
            X = generate_orthogonal(10, 10, seed)
            y = X @ np.random.default_rng(seed + 100).uniform(-5, 5, 10)
            xty = X.T @ y
            if np.min(np.abs(np.abs(xty) - np.sqrt(2 * lam))) < 1e-6:
                continue
            sol = lass0_pipeline(X, y, lam, lasso_cfg=LassoConfig(lam=lam, standardize=False))
            np.testing.assert_allclose(sol.beta, hard_threshold_oracle(xty, lam), atol=1e-8)


def test_pipeline_lambda_zero_is_full_ols():
    rng = np.random.default_rng(17)
    X = rng.standard_normal((40, 6))
    y = rng.standard_normal(40)
    sol = lass0_pipeline(X, y, 0.0, lasso_cfg=LassoConfig(lam=0.0, standardize=False))
    ols = np.linalg.lstsq(X, y, rcond=None)[0]
    np.testing.assert_allclose(sol.beta, ols, atol=1e-8)


def test_pipeline_zero_response_gives_empty_model():
    rng = np.random.default_rng(19)
    X = rng.standard_normal((30, 5))
    sol = lass0_pipeline(X, np.zeros(30), 1.0, lasso_cfg=LassoConfig(lam=1.0, standardize=False))
    assert np.all(sol.beta == 0.0)
    assert sol.objective == 0.0


def test_pipeline_standardized_objective_is_recomputable():
    inst = generate_synthetic(SyntheticSpec(n=100, p=8, sparsity=3, seed=23))
    res = pipeline_solutions(inst.X, inst.y, 0.5)
    for sol in (res.lasso, res.lass0):
        recomputed = l0_objective(inst.X, inst.y, sol.beta, sol.lam, sol.intercept)
        assert sol.objective == pytest.approx(recomputed, abs=1e-10)
    assert res.lass0.objective <= res.polished_objective + 1e-12


def test_pipeline_independent_init_lambda():
    inst = generate_synthetic(SyntheticSpec(n=80, p=10, sparsity=3, seed=29))
    res = pipeline_solutions(inst.X, inst.y, 0.4, init_lam=0.05)
    assert res.lasso.lam == pytest.approx(0.05)
    assert res.lass0.lam == pytest.approx(0.4)


def test_lass0_config_validation():
    with pytest.raises(ValueError):
        Lass0Config(lam=-1.0)
    with pytest.raises(ValueError):
        Lass0Config(lam=1.0, min_improvement=0.0)
    with pytest.raises(ValueError):
        Lass0Config(lam=1.0, max_steps=0)
    with pytest.raises(ValueError):
        Lass0Config(lam=1.0, tie_break="random")


def test_lass0_tie_break_prefers_lowest_index():
    # two identical columns from an empty start: both would improve equally
    X = np.column_stack([np.ones(4), np.ones(4)])
    y = np.ones(4)
    sol, trace = lass0_fit(X, y, SupportSet.from_iterable([], 2), Lass0Config(lam=0.1))
    assert trace.index[0] == 0
    assert sol.support.indices == (0,)


def test_lass0_polish_on_init_support_runs_first():
    # init support {0}: the first reported objective must already be the
    # re-solved least-squares value on that support, not the raw init
    X = np.eye(2)
    y = np.array([5.0, 0.1])
    init = np.array([1.0, 0.0])  # far from the OLS value 5.0
    sol, trace = lass0_fit(X, y, init, Lass0Config(lam=2.0))
    np.testing.assert_allclose(sol.beta, [5.0, 0.0], atol=1e-12)
    expected_first = l0_objective(X, y, restricted_ols(X, y, [0]), 2.0)
    if len(trace):
        assert trace.objective_before[0] == pytest.approx(expected_first, abs=1e-12)
