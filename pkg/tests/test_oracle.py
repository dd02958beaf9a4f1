import numpy as np
import pytest

from lasszero.data import generate_orthogonal, inject_collinear
from lasszero.lass0 import l0_objective
from lasszero.oracle import exhaustive_l0, hard_threshold_oracle, soft_threshold_oracle


def test_exhaustive_hand_enumerated_instance():
    # subsets of I2 with y=[3, 0.5], lam=2: {} -> 4.625, {0} -> 2.125,
    # {1} -> 6.5, {0,1} -> 4
    res = exhaustive_l0(np.eye(2), np.array([3.0, 0.5]), 2.0)
    np.testing.assert_allclose(res.beta, [3.0, 0.0])
    assert res.objective == pytest.approx(2.125, abs=1e-12)
    assert res.subsets_examined == 4
    assert res.support.indices == (0,)


def test_exhaustive_lambda_zero_is_full_ols():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((20, 5))
    y = rng.standard_normal(20)
    res = exhaustive_l0(X, y, 0.0)
    np.testing.assert_allclose(res.beta, np.linalg.lstsq(X, y, rcond=None)[0], atol=1e-10)


def test_exhaustive_zero_response():
    res = exhaustive_l0(np.eye(3), np.zeros(3), 1.0)
    assert np.all(res.beta == 0.0)
    assert res.objective == 0.0


def test_exhaustive_refuses_large_p():
    X = np.random.default_rng(1).standard_normal((5, 21))
    with pytest.raises(ValueError, match="refus"):
        exhaustive_l0(X, np.zeros(5), 1.0)
    with pytest.raises(ValueError):
        exhaustive_l0(np.eye(4), np.zeros(4), 1.0, max_p=3)


def test_exhaustive_agrees_with_hard_threshold_on_orthonormal():
    for seed in range(10):
        X = generate_orthogonal(10, 10, seed)
        y = X @ np.random.default_rng(seed).uniform(-5, 5, 10)
        for lam in (0.5, 2.0, 5.0):
            xty = X.T @ y
            if np.min(np.abs(np.abs(xty) - np.sqrt(2 * lam))) < 1e-6:
                continue
            res = exhaustive_l0(X, y, lam)
            np.testing.assert_allclose(res.beta, hard_threshold_oracle(xty, lam), atol=1e-10)


def test_exhaustive_objective_consistent_with_l0_objective():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((30, 8))
    y = rng.standard_normal(30)
    res = exhaustive_l0(X, y, 0.3)
    assert res.objective == pytest.approx(l0_objective(X, y, res.beta, 0.3), abs=1e-10)


def test_exhaustive_gray_matches_plain():
    rng = np.random.default_rng(4)
    X = rng.standard_normal((40, 10))
    y = X @ (rng.uniform(-1, 1, 10) * (rng.random(10) < 0.5)) + 0.3 * rng.standard_normal(40)
    for lam in (0.05, 0.5, 2.0):
        plain = exhaustive_l0(X, y, lam, method="plain")
        gray = exhaustive_l0(X, y, lam, method="gray")
        assert plain.support.indices == gray.support.indices
        assert plain.objective == pytest.approx(gray.objective, abs=1e-9)


def test_exhaustive_gray_handles_collinear_columns():
    rng = np.random.default_rng(5)
    X = inject_collinear(rng.standard_normal((30, 8)), 2, 5, -1.5)
    y = X @ np.array([0.0, 1.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0]) + 0.1 * rng.standard_normal(30)
    plain = exhaustive_l0(X, y, 0.4, method="plain")
    gray = exhaustive_l0(X, y, 0.4, method="gray")
    assert plain.objective == pytest.approx(gray.objective, abs=1e-9)
    assert plain.support.indices == gray.support.indices


def test_exhaustive_tie_breaks_toward_smaller_then_lex():
    # identical columns: {0}, {1} and {0,1} all reach zero residual; with
    # lam=0 the empty set stays at 0.5*||y||^2 so {0} must win the tie
    X = np.column_stack([np.ones(4), np.ones(4)])
    y = np.ones(4) * 2
    res = exhaustive_l0(X, y, 0.0)
    assert res.support.indices == (0,)


def test_exhaustive_dominates_any_candidate():
    rng = np.random.default_rng(7)
    X = rng.standard_normal((40, 9))
    y = rng.standard_normal(40)
    lam = 0.2
    res = exhaustive_l0(X, y, lam)
    for _ in range(50):
        beta = rng.standard_normal(9) * (rng.random(9) < 0.4)
        assert l0_objective(X, y, beta, lam) >= res.objective - 1e-10


def test_exhaustive_unknown_method():
    with pytest.raises(ValueError):
        exhaustive_l0(np.eye(2), np.ones(2), 1.0, method="magic")


def test_hard_threshold_examples():
    np.testing.assert_allclose(hard_threshold_oracle([3.0, 1.0, 0.5], 2.0), [3.0, 0.0, 0.0])
    np.testing.assert_allclose(hard_threshold_oracle([3.0, 1.2, 0.5], 0.5), [3.0, 1.2, 0.0])
    v = np.array([0.3, -0.2, 1.0])
    np.testing.assert_allclose(hard_threshold_oracle(v, 0.0), v)


def test_soft_threshold_oracle_examples():
    np.testing.assert_allclose(soft_threshold_oracle([3.0, 1.0, -4.0], 2.0), [1.0, 0.0, -2.0])
    v = np.array([0.3, -0.2, 1.0])
    np.testing.assert_allclose(soft_threshold_oracle(v, 0.0), v)
    assert np.all(soft_threshold_oracle([0.5, -0.9], 1.0) == 0.0)


def test_threshold_oracles_reject_negative_lambda():
    with pytest.raises(ValueError):
        hard_threshold_oracle([1.0], -0.5)
    with pytest.raises(ValueError):
        soft_threshold_oracle([1.0], -0.5)
