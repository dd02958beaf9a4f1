"""Ground-truth solvers used only for verification.

`exhaustive_l0` enumerates every support and is deliberately independent
of the package's factored search path: for p <= 12 each subset is solved
fresh through LAPACK (batched by subset size), with losses evaluated from
explicit residuals. Larger p switches to a Gray-code walk with
incremental factor updates so p = 16..20 stays tractable.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import _kernels
from .types import SupportSet, as_matrix, as_vector

__all__ = [
    "OracleResult",
    "exhaustive_l0",
    "hard_threshold_oracle",
    "soft_threshold_oracle",
]

_GRAY_RANK_TOL = 1e-10
_CHUNK_ELEMENTS = 2_000_000


@dataclass
class OracleResult:
    beta: np.ndarray
    objective: float
    subsets_examined: int
    support: SupportSet


def hard_threshold_oracle(Xty, lam: float) -> np.ndarray:
    """Keep entries strictly above sqrt(2*lam) in magnitude, zero the rest.

    Closed form of the zero-norm problem for orthonormal designs.
    """
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    v = as_vector(Xty, "Xty")
    t = np.sqrt(2.0 * lam)
    return np.where(np.abs(v) > t, v, 0.0)


def soft_threshold_oracle(Xty, lam: float) -> np.ndarray:
    """Componentwise shrink-by-lam; the orthonormal-design lasso solution."""
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    v = as_vector(Xty, "Xty")
    return np.sign(v) * np.maximum(np.abs(v) - lam, 0.0)


def _solve_subsets_of_size(X, y, G, c, m, best):
    """Scan all supports of size m, updating the running best.

    Subsets are stacked and solved in one LAPACK call per chunk; losses
    come from explicit residuals, so a badly conditioned subset can only
    look worse than it truly is, never better. Singular or non-finite
    batches fall back to per-subset least squares on the Gram system.
    """
    n, p = X.shape
    idx_all = np.array(list(combinations(range(p), m)), dtype=np.intp)
    chunk = max(1, _CHUNK_ELEMENTS // (n * m))
    for lo in range(0, idx_all.shape[0], chunk):
        idx = idx_all[lo:lo + chunk]
        Gs = G[idx[:, :, None], idx[:, None, :]]
        cs = c[idx]
        try:
            betas = np.linalg.solve(Gs, cs[:, :, None])[:, :, 0]
            if not np.all(np.isfinite(betas)):
                raise np.linalg.LinAlgError
        except np.linalg.LinAlgError:
            betas = np.stack([np.linalg.lstsq(Gs[t], cs[t], rcond=None)[0] for t in range(idx.shape[0])])
        preds = np.einsum("nkm,km->nk", X[:, idx], betas)
        R = y[:, None] - preds
        losses = 0.5 * np.einsum("nk,nk->k", R, R)
        objs = losses + best.lam * m
        t = int(np.argmin(objs))
        # enumeration runs smallest size first, lexicographic within size,
        # and the running best is only displaced by a strictly lower value
        if objs[t] < best.objective:
            best.objective = float(objs[t])
            best.indices = tuple(int(i) for i in idx[t])
    return best


class _Best:
    def __init__(self, lam, empty_objective):
        self.lam = lam
        self.objective = empty_objective
        self.indices: tuple[int, ...] = ()


def exhaustive_l0(X, y, lam: float, max_p: int = 20, method: str = "auto") -> OracleResult:
    """Global minimum of 0.5*||y - X beta||^2 + lam*||beta||_0 by enumeration.

    Ties break toward the smaller support, then the lexicographically
    smaller one. Refuses p > max_p outright; 2**p restricted solves is the
    whole cost model.
    """
    X = as_matrix(X)
    y = as_vector(y)
    if y.shape[0] != X.shape[0]:
        raise ValueError("X and y have mismatched numbers of rows")
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    p = X.shape[1]
    if p > max_p:
        raise ValueError(f"refusing exhaustive search with p={p} > max_p={max_p}")
    if method not in ("auto", "plain", "gray"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        method = "plain" if p <= 12 else "gray"

    G = X.T @ X
    c = X.T @ y
    yty = float(y @ y)

    if method == "plain":
        best = _Best(lam, 0.5 * yty)
        for m in range(1, p + 1):
            best = _solve_subsets_of_size(X, y, G, c, m, best)
        indices = best.indices
    else:
        mask, _, _ = _kernels.best_subset(G, c, yty, lam, _GRAY_RANK_TOL)
        indices = tuple(i for i in range(p) if (mask >> i) & 1)

    # re-solve the winner fresh for full accuracy
    beta = np.zeros(p)
    if indices:
        beta_f, *_ = np.linalg.lstsq(X[:, list(indices)], y, rcond=None)
        beta[list(indices)] = beta_f
    r = y - X @ beta
    objective = 0.5 * float(r @ r) + lam * int(np.count_nonzero(beta))
    return OracleResult(
        beta=beta,
        objective=objective,
        subsets_examined=2**p,
        support=SupportSet.from_beta(beta),
    )
