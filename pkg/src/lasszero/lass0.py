"""Greedy stepwise support search on the zero-norm objective.

The search starts from an L1 solution, re-solves least squares on its
support, then repeatedly evaluates every single-index addition and
removal, moving to the best candidate while it improves the penalized
objective 0.5*||y - X beta||^2 + lam*||beta||_0 by at least a strict
margin. The result is locally optimal: no single add or remove helps.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .lasso import LassoConfig, fit_lasso, standardize
from .linalg import chol_build, restricted_ols
from .types import SparseSolution, SupportSet, as_matrix, as_vector

__all__ = [
    "Lass0Config",
    "StepTrace",
    "PipelineResult",
    "l0_objective",
    "lass0_fit",
    "lass0_pipeline",
    "pipeline_solutions",
    "improving_step",
]

RANK_TOL = 1e-10


@dataclass(frozen=True)
class Lass0Config:
    lam: float
    min_improvement: float = 1e-10
    max_steps: int | None = None  # None resolves to 10 * p at fit time
    tie_break: str = "lowest_index"

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if self.min_improvement <= 0:
            raise ValueError("min_improvement must be positive")
        if self.max_steps is not None and self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if self.tie_break != "lowest_index":
            raise ValueError(f"unknown tie_break rule {self.tie_break!r}")


@dataclass
class StepTrace:
    """Accepted steps: which index moved, which way, and both objectives."""

    index: np.ndarray
    is_add: np.ndarray
    objective_before: np.ndarray
    objective_after: np.ndarray

    def __len__(self) -> int:
        return int(self.index.shape[0])

    def improvements(self) -> np.ndarray:
        return self.objective_before - self.objective_after


def l0_objective(X, y, beta, lam: float, intercept: float = 0.0) -> float:
    """0.5*||y - X beta - intercept||^2 + lam * (number of exact nonzeros)."""
    X = as_matrix(X)
    y = as_vector(y)
    beta = as_vector(beta, "beta")
    if y.shape[0] != X.shape[0] or beta.shape[0] != X.shape[1]:
        raise ValueError("dimension mismatch between X, y and beta")
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    r = y - X @ beta - intercept
    return 0.5 * float(r @ r) + lam * int(np.count_nonzero(beta))


def _init_support(init, p: int) -> SupportSet:
    if isinstance(init, SparseSolution):
        if init.beta.shape[0] != p:
            raise ValueError("init.beta length does not match number of columns")
        return SupportSet.from_beta(init.beta)
    if isinstance(init, SupportSet):
        if init.universe != p:
            raise ValueError("init support universe does not match number of columns")
        return init
    beta = as_vector(np.asarray(init, dtype=np.float64), "init")
    if beta.shape[0] != p:
        raise ValueError("init length does not match number of columns")
    return SupportSet.from_beta(beta)


def _candidate_objective(X, y, support: SupportSet, lam: float) -> tuple[np.ndarray, float]:
    beta = restricted_ols(X, y, support)
    return beta, l0_objective(X, y, beta, lam)


def _slow_steps(X, y, support, lam, min_improvement, budget, trace_rows):
    """Direct candidate evaluation for rank-deficient states.

    Solves every toggled support from scratch (minimum-norm on dependent
    sets), so it stays correct where the factored fast path cannot start.
    Stops as soon as the current support factors cleanly, the budget runs
    out, or no candidate improves.
    """
    p = X.shape[1]
    G = X.T @ X
    used = 0
    while used < budget:
        if used > 0 and chol_build(G, support.indices, RANK_TOL) is not None:
            return support, used, None  # full rank now: caller resumes fast path
        _, current = _candidate_objective(X, y, support, lam)
        best_j, best_obj = -1, np.inf
        for j in range(p):
            _, obj = _candidate_objective(X, y, support.toggled(j), lam)
            if obj < best_obj:
                best_j, best_obj = j, obj
        if not current - best_obj >= min_improvement:
            return support, used, True
        support = support.toggled(best_j)
        trace_rows.append((best_j, best_j in support, current, best_obj))
        used += 1
    return support, used, False


def lass0_fit(X, y, init, cfg: Lass0Config) -> tuple[SparseSolution, StepTrace]:
    """Run the stepwise search from an initial solution or support.

    `init` may be a SparseSolution, a SupportSet, or a coefficient vector;
    only its support matters, since the first move is a least-squares
    re-solve on that support. Returns the locally optimal solution and the
    trace of accepted steps. Hitting max_steps flags the solution
    non-converged instead of raising.
    """
    X = as_matrix(X)
    y = as_vector(y)
    if y.shape[0] != X.shape[0]:
        raise ValueError("X and y have mismatched numbers of rows")
    p = X.shape[1]
    support = _init_support(init, p)
    max_steps = cfg.max_steps if cfg.max_steps is not None else 10 * p

    rows: list[tuple[int, bool, float, float]] = []
    steps_left = max_steps
    converged = False

    G = X.T @ X
    c = X.T @ y
    yty = float(y @ y)

    while steps_left > 0:
        out = _kernels.stepwise_search(
            G, c, yty, cfg.lam, support.to_array(), cfg.min_improvement, steps_left, RANK_TOL
        )
        indices, _, _, t_index, t_is_add, t_before, t_after, k_converged, ok = out
        if ok:
            for i in range(t_index.shape[0]):
                rows.append((int(t_index[i]), bool(t_is_add[i]), float(t_before[i]), float(t_after[i])))
            support = SupportSet.from_iterable(indices, p)
            converged = bool(k_converged)
            break
        support, used, slow_converged = _slow_steps(
            X, y, support, cfg.lam, cfg.min_improvement, steps_left, rows
        )
        steps_left -= used
        if slow_converged is None and steps_left > 0:
            continue  # support became full rank: hand back to the fast path
        converged = bool(slow_converged)
        break

    beta = restricted_ols(X, y, support)
    final_support = SupportSet.from_beta(beta)
    sol = SparseSolution(
        beta=beta,
        support=final_support,
        lam=cfg.lam,
        objective=l0_objective(X, y, beta, cfg.lam),
        converged=converged,
    )
    trace = StepTrace(
        index=np.asarray([r[0] for r in rows], dtype=np.intp),
        is_add=np.asarray([r[1] for r in rows], dtype=bool),
        objective_before=np.asarray([r[2] for r in rows]),
        objective_after=np.asarray([r[3] for r in rows]),
    )
    return sol, trace


def improving_step(X, y, solution: SparseSolution, cfg: Lass0Config):
    """Certificate check: the best single add/remove, or None if none helps.

    Evaluates every candidate through a fresh restricted solve, so it is
    independent of the factored search path. Works on the no-intercept
    problem exactly as given: pass the same (possibly standardized) X and
    y the solution was fit on.
    """
    X = as_matrix(X)
    y = as_vector(y)
    support = SupportSet.from_beta(solution.beta)
    current = l0_objective(X, y, restricted_ols(X, y, support), cfg.lam)
    best = None
    best_obj = np.inf
    for j in range(X.shape[1]):
        cand = support.toggled(j)
        _, obj = _candidate_objective(X, y, cand, cfg.lam)
        if obj < best_obj:
            best_obj = obj
            best = (j, j in cand, obj)
    if best is not None and current - best_obj >= cfg.min_improvement:
        return best
    return None


@dataclass
class PipelineResult:
    """L1 fit, its least-squares re-solve, and the stepwise result."""

    lasso: SparseSolution
    polished_objective: float
    lass0: SparseSolution
    trace: StepTrace


def _rescale(sol: SparseSolution, X, y, x_mean, y_mean, scale, lam: float) -> SparseSolution:
    beta = sol.beta / scale
    intercept = y_mean - float(x_mean @ beta)
    support = SupportSet.from_beta(beta)
    r = y - X @ beta - intercept
    return SparseSolution(
        beta=beta,
        support=support,
        lam=lam,
        objective=0.5 * float(r @ r) + lam * len(support),
        converged=sol.converged,
        intercept=intercept,
        sweep_objectives=sol.sweep_objectives,
    )


def pipeline_solutions(
    X,
    y,
    lam: float,
    cfg: Lass0Config | None = None,
    lasso_cfg: LassoConfig | None = None,
    init_lam: float | None = None,
) -> PipelineResult:
    """L1 solve at `lam` (or `init_lam`), then the stepwise search at `lam`.

    Both stages share one standardization pass when the lasso config asks
    for it, and everything is mapped back to the original scale at the
    end, including the polished initializer's objective.
    """
    X = as_matrix(X)
    y = as_vector(y)
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    cfg = replace(cfg, lam=lam) if cfg is not None else Lass0Config(lam=lam)
    base = lasso_cfg if lasso_cfg is not None else LassoConfig(lam=lam)
    lasso_cfg = replace(base, lam=lam if init_lam is None else init_lam)

    if lasso_cfg.standardize:
        Xs, ys, x_mean, y_mean, scale = standardize(X, y)
        inner_cfg = replace(lasso_cfg, standardize=False)
        lasso_std = fit_lasso(Xs, ys, inner_cfg)
        polished_std = restricted_ols(Xs, ys, lasso_std.support)
        lass0_std, trace = lass0_fit(Xs, ys, lasso_std, cfg)

        lasso_sol = _rescale(lasso_std, X, y, x_mean, y_mean, scale, lasso_cfg.lam)
        lass0_sol = _rescale(lass0_std, X, y, x_mean, y_mean, scale, lam)
        pol = _rescale(
            SparseSolution(polished_std, SupportSet.from_beta(polished_std), lam, 0.0, True),
            X, y, x_mean, y_mean, scale, lam,
        )
        polished_objective = pol.objective
    else:
        lasso_sol = fit_lasso(X, y, lasso_cfg)
        polished = restricted_ols(X, y, lasso_sol.support)
        polished_objective = l0_objective(X, y, polished, lam)
        lass0_sol, trace = lass0_fit(X, y, lasso_sol, cfg)

    return PipelineResult(
        lasso=lasso_sol,
        polished_objective=polished_objective,
        lass0=lass0_sol,
        trace=trace,
    )


def lass0_pipeline(
    X,
    y,
    lam: float,
    cfg: Lass0Config | None = None,
    lasso_cfg: LassoConfig | None = None,
    init_lam: float | None = None,
) -> SparseSolution:
    """Convenience wrapper returning only the stepwise-search solution."""
    return pipeline_solutions(X, y, lam, cfg, lasso_cfg, init_lam).lass0
