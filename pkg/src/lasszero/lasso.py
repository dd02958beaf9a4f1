"""L1-penalized least squares by cyclic coordinate descent.

Solves min 0.5*||y - X beta||^2 + lam*||beta||_1. With standardization on
(the default), y is centered and the columns of X are centered and scaled
to unit l2 norm before solving; coefficients are mapped back to the
original scale and the intercept absorbs the centering. The intercept is
never penalized and never counted in the support.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from . import _kernels
from .types import SparseSolution, SupportSet, as_matrix, as_vector

__all__ = [
    "LassoConfig",
    "LambdaGrid",
    "soft_threshold",
    "fit_lasso",
    "lasso_path",
    "default_grid",
    "kkt_violation",
]


@dataclass(frozen=True)
class LassoConfig:
    lam: float
    max_iters: int = 10_000
    coef_tol: float = 1e-8
    standardize: bool = True

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.coef_tol <= 0:
            raise ValueError("coef_tol must be positive")


@dataclass(frozen=True)
class LambdaGrid:
    """Strictly decreasing positive penalty values."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise ValueError("grid must be nonempty")
        prev = np.inf
        for v in self.values:
            if not (0 < v < prev):
                raise ValueError("grid values must be strictly decreasing and positive")
            prev = v
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "LambdaGrid":
        return cls(tuple(sorted({float(v) for v in values}, reverse=True)))

    def to_array(self) -> np.ndarray:
        return np.asarray(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[float]:
        return iter(self.values)

    def __getitem__(self, i: int) -> float:
        return self.values[i]


def soft_threshold(z: float, t: float) -> float:
    """Shrink z toward zero by t: z-t above t, z+t below -t, else 0."""
    if t < 0:
        raise ValueError("threshold must be nonnegative")
    if z > t:
        return z - t
    if z < -t:
        return z + t
    return 0.0


def standardize(X: np.ndarray, y: np.ndarray):
    """Center y, center X columns and scale them to unit l2 norm.

    Columns that are constant after centering are zeroed out and given a
    unit scale so they can never enter a model. Returns
    (Xs, ys, x_mean, y_mean, scale).
    """
    x_mean = X.mean(axis=0)
    Xc = X - x_mean
    scale = np.sqrt(np.einsum("ij,ij->j", Xc, Xc))
    pre_norm = np.sqrt(np.einsum("ij,ij->j", X, X))
    constant = scale <= 1e-10 * np.maximum(pre_norm, 1.0)
    safe = np.where(constant, 1.0, scale)
    Xs = Xc / safe
    if constant.any():
        Xs[:, constant] = 0.0
    y_mean = float(y.mean())
    return Xs, y - y_mean, x_mean, y_mean, safe


def _finalize(X, y, beta_solver, lam, converged, sweep_objectives, transform) -> SparseSolution:
    """Map solver-scale coefficients back and attach the zero-norm objective."""
    if transform is None:
        beta = beta_solver
        intercept = 0.0
    else:
        x_mean, y_mean, scale = transform
        beta = beta_solver / scale
        intercept = y_mean - float(x_mean @ beta)
    support = SupportSet.from_beta(beta)
    r = y - X @ beta - intercept
    objective = 0.5 * float(r @ r) + lam * len(support)
    return SparseSolution(
        beta=beta,
        support=support,
        lam=lam,
        objective=objective,
        converged=converged,
        intercept=intercept,
        sweep_objectives=sweep_objectives,
    )


def fit_lasso(X, y, cfg: LassoConfig) -> SparseSolution:
    """Solve the L1 problem at cfg.lam by coordinate descent.

    A non-converged run (max_iters hit) returns the best iterate with
    converged=False rather than raising.
    """
    X = as_matrix(X)
    y = as_vector(y)
    if y.shape[0] != X.shape[0]:
        raise ValueError("X and y have mismatched numbers of rows")
    if cfg.standardize:
        Xs, ys, x_mean, y_mean, scale = standardize(X, y)
        transform = (x_mean, y_mean, scale)
    else:
        Xs, ys = X, y
        transform = None
    Xk = np.asfortranarray(Xs)
    beta = np.zeros(X.shape[1])
    _, converged, objectives = _kernels.cd_fit(Xk, ys.copy(), cfg.lam, beta, cfg.max_iters, cfg.coef_tol)
    return _finalize(X, y, beta, cfg.lam, converged, objectives, transform)


def lasso_path(X, y, grid: LambdaGrid, cfg: LassoConfig) -> list[SparseSolution]:
    """Solve along a decreasing grid, warm-starting each value from the last."""
    X = as_matrix(X)
    y = as_vector(y)
    if y.shape[0] != X.shape[0]:
        raise ValueError("X and y have mismatched numbers of rows")
    if cfg.standardize:
        Xs, ys, x_mean, y_mean, scale = standardize(X, y)
        transform = (x_mean, y_mean, scale)
    else:
        Xs, ys = X, y
        transform = None
    Xk = np.asfortranarray(Xs)
    beta = np.zeros(X.shape[1])
    out = []
    for lam in grid:
        _, converged, objectives = _kernels.cd_fit(Xk, ys.copy(), lam, beta, cfg.max_iters, cfg.coef_tol)
        out.append(_finalize(X, y, beta.copy(), lam, converged, objectives, transform))
    return out


def path_predictions(X_train, y_train, X_eval, grid: LambdaGrid, cfg: LassoConfig) -> np.ndarray:
    """Predictions on X_eval for every grid value, warm-started down the path.

    The cheap core of cross-validated penalty selection: no per-value
    solution objects, just a (len(grid), n_eval) array.
    """
    X_train = as_matrix(X_train)
    y_train = as_vector(y_train)
    X_eval = as_matrix(X_eval, "X_eval")
    if cfg.standardize:
        Xs, ys, x_mean, y_mean, scale = standardize(X_train, y_train)
    else:
        Xs, ys, x_mean, y_mean, scale = X_train, y_train, None, 0.0, None
    Xk = np.asfortranarray(Xs)
    beta = np.zeros(X_train.shape[1])
    out = np.empty((len(grid), X_eval.shape[0]))
    for gi, lam in enumerate(grid):
        _kernels.cd_fit(Xk, ys.copy(), lam, beta, cfg.max_iters, cfg.coef_tol)
        if cfg.standardize:
            b = beta / scale
            out[gi] = X_eval @ b + (y_mean - float(x_mean @ b))
        else:
            out[gi] = X_eval @ beta
    return out


def default_grid(X, y, n_values: int = 100, min_ratio: float = 1e-3, standardize_data: bool = True) -> LambdaGrid:
    """Log-spaced grid from lam_max down to min_ratio * lam_max.

    lam_max is the smallest penalty with an all-zero solution,
    max_j |x_j' y| on the (optionally standardized) data.
    """
    if n_values < 1:
        raise ValueError("n_values must be at least 1")
    if not 0 < min_ratio < 1:
        raise ValueError("min_ratio must be in (0, 1)")
    X = as_matrix(X)
    y = as_vector(y)
    if standardize_data:
        Xs, ys, *_ = standardize(X, y)
    else:
        Xs, ys = X, y
    lam_max = float(np.max(np.abs(Xs.T @ ys)))
    if lam_max <= 0:
        raise ValueError("response carries no signal (all correlations are zero); no usable grid")
    if n_values == 1:
        return LambdaGrid((lam_max,))
    return LambdaGrid(tuple(np.geomspace(lam_max, lam_max * min_ratio, n_values)))


def kkt_violation(X, y, beta, lam: float) -> float:
    """Largest stationarity violation for the no-intercept L1 problem.

    For beta_j = 0 the gradient must satisfy |x_j' r| <= lam; for active
    coordinates x_j' r = lam * sign(beta_j). Returns the max excess.
    """
    X = as_matrix(X)
    y = as_vector(y)
    beta = as_vector(beta, "beta")
    g = X.T @ (y - X @ beta)
    active = beta != 0.0
    viol = np.maximum(np.abs(g) - lam, 0.0)
    viol[active] = np.abs(g[active] - lam * np.sign(beta[active]))
    return float(viol.max()) if viol.size else 0.0
