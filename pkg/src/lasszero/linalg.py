"""Restricted least squares over explicit support sets.

Solves go through a Cholesky factor of the active-set Gram matrix, with
single-index insert/delete updates for stepping between neighbouring
supports and a minimum-norm fallback when the active columns are
numerically dependent. Coefficients outside the support are never
computed, so they are exactly zero by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.linalg import solve_triangular

from .types import SupportSet, as_matrix, as_vector

__all__ = [
    "SolverConfig",
    "FactorState",
    "factor_state",
    "gram_update",
    "restricted_ols",
    "residual_loss",
]


@dataclass(frozen=True)
class SolverConfig:
    """Numerical guards for restricted solves and factor updates.

    rank_tol is relative: a Cholesky pivot at or below rank_tol times the
    largest Gram diagonal marks the active set as rank deficient.
    """

    rank_tol: float = 1e-10
    refactor_tol: float = 1e-8
    refactor_every: int = 64

    def __post_init__(self) -> None:
        if not 0 < self.rank_tol < 1:
            raise ValueError("rank_tol must be in (0, 1)")
        if self.refactor_tol <= 0:
            raise ValueError("refactor_tol must be positive")
        if self.refactor_every < 1:
            raise ValueError("refactor_every must be at least 1")


DEFAULT_SOLVER_CONFIG = SolverConfig()


def _as_support(support, p: int) -> SupportSet:
    if isinstance(support, SupportSet):
        if support.universe != p:
            raise ValueError(f"support universe {support.universe} != number of columns {p}")
        return support
    return SupportSet.from_iterable(support, p)


def residual_loss(X, y, beta) -> float:
    """Half squared residual norm, 0.5 * ||y - X beta||^2."""
    X = as_matrix(X)
    y = as_vector(y)
    beta = as_vector(beta, "beta")
    if y.shape[0] != X.shape[0]:
        raise ValueError(f"y has length {y.shape[0]} but X has {X.shape[0]} rows")
    if beta.shape[0] != X.shape[1]:
        raise ValueError(f"beta has length {beta.shape[0]} but X has {X.shape[1]} columns")
    r = y - X @ beta
    return 0.5 * float(r @ r)


def chol_append(L: np.ndarray, g: np.ndarray, d: float, pivot_floor: float):
    """Grow a lower Cholesky factor by one trailing row/column.

    L is the factor of G_FF, g = G[F, i], d = G[i, i]. Returns the enlarged
    factor, or None when the Schur pivot falls at or below pivot_floor
    (the new column is numerically inside the current span).
    """
    m = L.shape[0]
    if m == 0:
        if d <= pivot_floor:
            return None
        return np.array([[np.sqrt(d)]])
    v = solve_triangular(L, g, lower=True, check_finite=False)
    s = d - float(v @ v)
    if s <= pivot_floor:
        return None
    out = np.zeros((m + 1, m + 1))
    out[:m, :m] = L
    out[m, :m] = v
    out[m, m] = np.sqrt(s)
    return out


def chol_delete(L: np.ndarray, k: int) -> np.ndarray:
    """Shrink a lower Cholesky factor by removing row/column k.

    The trailing block absorbs the deleted column through a positive
    rank-one update, which cannot fail.
    """
    m = L.shape[0]
    out = np.zeros((m - 1, m - 1))
    out[:k, :k] = L[:k, :k]
    out[k:, :k] = L[k + 1:, :k]
    T = L[k + 1:, k + 1:].copy()
    u = L[k + 1:, k].copy()
    q = T.shape[0]
    for i in range(q):
        r = np.hypot(T[i, i], u[i])
        c = r / T[i, i]
        s = u[i] / T[i, i]
        T[i, i] = r
        if i + 1 < q:
            T[i + 1:, i] = (T[i + 1:, i] + s * u[i + 1:]) / c
            u[i + 1:] = c * u[i + 1:] - s * T[i + 1:, i]
    out[k:, k:] = T
    return out


def chol_build(G: np.ndarray, order: Iterable[int], rank_tol: float):
    """Factor G restricted to `order` by sequential appends.

    Returns None as soon as a pivot falls below the guard, i.e. the
    selected columns are numerically dependent.
    """
    gmax = float(np.max(np.diag(G))) if G.shape[0] else 0.0
    floor = rank_tol * gmax
    L = np.zeros((0, 0))
    taken: list[int] = []
    for i in order:
        L = chol_append(L, G[np.ix_(taken, [i])].ravel(), float(G[i, i]), floor)
        if L is None:
            return None
        taken.append(i)
    return L


def _solve_factor(L: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    if L.shape[0] == 0:
        return np.zeros(0)
    z = solve_triangular(L, rhs, lower=True, check_finite=False)
    return solve_triangular(L.T, z, lower=False, check_finite=False)


class FactorState:
    """Cholesky state of the Gram matrix restricted to an active set.

    Indices are kept in insertion order because the factor depends on it.
    A deficient state (numerically dependent active columns) carries no
    factor and answers through minimum-norm least squares on X instead.
    Single-owner: callers must not mutate a state they have handed off.
    """

    __slots__ = ("indices", "L", "beta_active", "loss", "G", "c", "yty", "X", "y", "n_updates", "cfg")

    def __init__(self, indices, L, G, c, yty, X, y, n_updates, cfg):
        self.indices = list(indices)
        self.L = L
        self.G = G
        self.c = c
        self.yty = yty
        self.X = X
        self.y = y
        self.n_updates = n_updates
        self.cfg = cfg
        self._resolve()

    @property
    def deficient(self) -> bool:
        return self.L is None

    def _resolve(self) -> None:
        idx = np.asarray(self.indices, dtype=np.intp)
        if self.L is not None:
            self.beta_active = _solve_factor(self.L, self.c[idx])
        else:
            self.beta_active, *_ = np.linalg.lstsq(self.X[:, idx], self.y, rcond=None)
        # at any least-squares solution, ||y - X beta||^2 = y'y - beta' X'y
        self.loss = max(0.5 * (self.yty - float(self.beta_active @ self.c[idx])), 0.0)

    def solve(self) -> np.ndarray:
        """Full-length coefficient vector, exact zeros off the active set."""
        beta = np.zeros(self.G.shape[0])
        beta[self.indices] = self.beta_active
        return beta

    def support(self) -> SupportSet:
        return SupportSet.from_iterable(self.indices, self.G.shape[0])


def factor_state(X, y, support, cfg: SolverConfig | None = None) -> FactorState:
    """Build a fresh factorization state for the given support."""
    cfg = cfg or DEFAULT_SOLVER_CONFIG
    X = as_matrix(X)
    y = as_vector(y)
    if y.shape[0] != X.shape[0]:
        raise ValueError("X and y have mismatched numbers of rows")
    sup = _as_support(support, X.shape[1])
    G = X.T @ X
    c = X.T @ y
    yty = float(y @ y)
    L = chol_build(G, sup.indices, cfg.rank_tol)
    return FactorState(sup.indices, L, G, c, yty, X, y, 0, cfg)


def gram_update(state: FactorState, X, y, index: int, cfg: SolverConfig | None = None) -> FactorState:
    """Step a factorization state to F u {i} or F \\ {i}.

    Falls back to a full refactorization when the incremental update would
    be numerically unsafe, and refactors periodically to bound drift.
    """
    cfg = cfg or state.cfg
    p = state.G.shape[0]
    if not 0 <= index < p:
        raise ValueError(f"index {index} outside universe [0, {p})")

    if index in state.indices:
        new_indices = [i for i in state.indices if i != index]
    else:
        new_indices = state.indices + [index]

    def fresh() -> FactorState:
        L = chol_build(state.G, new_indices, cfg.rank_tol)
        return FactorState(new_indices, L, state.G, state.c, state.yty, state.X, state.y, 0, cfg)

    if state.deficient or state.n_updates + 1 >= cfg.refactor_every:
        return fresh()

    if index in state.indices:
        k = state.indices.index(index)
        L = chol_delete(state.L, k)
    else:
        gmax = float(np.max(np.diag(state.G)))
        idx = np.asarray(state.indices, dtype=np.intp)
        L = chol_append(state.L, state.G[idx, index], float(state.G[index, index]), cfg.rank_tol * gmax)
        if L is None:
            return fresh()
    return FactorState(new_indices, L, state.G, state.c, state.yty, state.X, state.y, state.n_updates + 1, cfg)


def restricted_ols(X, y, support, cfg: SolverConfig | None = None) -> np.ndarray:
    """Least squares restricted to a support set; zeros elsewhere.

    Minimizes 0.5 * ||y - X_F beta_F||^2 over coefficients on F. When the
    Gram matrix of X_F is rank deficient beyond cfg.rank_tol, returns the
    minimum-norm least-squares solution on F.
    """
    cfg = cfg or DEFAULT_SOLVER_CONFIG
    X = as_matrix(X)
    y = as_vector(y)
    if y.shape[0] != X.shape[0]:
        raise ValueError("X and y have mismatched numbers of rows")
    sup = _as_support(support, X.shape[1])
    beta = np.zeros(X.shape[1])
    if len(sup) == 0:
        return beta
    idx = sup.to_array()
    Xf = X[:, idx]
    G = Xf.T @ Xf
    L = chol_build(G, range(len(idx)), cfg.rank_tol)
    if L is None:
        beta_f, *_ = np.linalg.lstsq(Xf, y, rcond=None)
    else:
        beta_f = _solve_factor(L, Xf.T @ y)
    beta[idx] = beta_f
    return beta
