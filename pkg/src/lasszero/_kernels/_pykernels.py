"""Pure NumPy fallback for the hot loops.

Mirrors the compiled extension in `_ckernels` exactly: same update
formulas, same pivot guards, same tie-breaking. Used when the extension
is unavailable or when LASSZERO_PURE_PYTHON is set.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_triangular

from ..linalg import chol_append, chol_build, chol_delete

BACKEND_NAME = "pure"


def cd_fit(X, y, lam, beta, max_iters, tol):
    """Cyclic coordinate descent for 0.5*||y - X beta||^2 + lam*||beta||_1.

    Full passes alternate with sweeps over the current active set. `beta`
    is updated in place. Returns (sweeps, converged, per-sweep objectives).
    """
    X = np.asarray(X)
    n, p = X.shape
    norm2 = np.einsum("ij,ij->j", X, X)
    r = y - X @ beta
    objectives = np.empty(max_iters)
    sweeps = 0
    converged = False
    full = True
    active = np.arange(p)

    while sweeps < max_iters:
        order = np.arange(p) if full else active
        max_delta = 0.0
        for j in order:
            nj = norm2[j]
            if nj <= 0.0:
                continue
            bj = beta[j]
            rho = float(X[:, j] @ r) + nj * bj
            if rho > lam:
                bn = (rho - lam) / nj
            elif rho < -lam:
                bn = (rho + lam) / nj
            else:
                bn = 0.0
            d = bn - bj
            if d != 0.0:
                r -= d * X[:, j]
                beta[j] = bn
            if abs(d) > max_delta:
                max_delta = abs(d)
        objectives[sweeps] = 0.5 * float(r @ r) + lam * float(np.abs(beta).sum())
        sweeps += 1
        if full:
            if max_delta < tol:
                converged = True
                break
            active = np.flatnonzero(beta != 0.0)
            full = active.size == 0 or active.size == p
        elif max_delta < tol:
            full = True
    return sweeps, converged, objectives[:sweeps].copy()


def stepwise_search(G, c, yty, lam, support, min_improvement, max_steps, rank_tol):
    """Greedy single-index support search on the zero-norm objective.

    Starting from `support`, repeatedly evaluates every single add/remove
    candidate through the current Cholesky factor, moves to the best one
    while it improves by at least min_improvement, and stops otherwise.
    Ties go to the lowest feature index (an index is a removal when active,
    an addition when not).

    Returns (indices, beta_active, loss, t_index, t_is_add, t_before,
    t_after, converged, ok). ok=False means the initial support is rank
    deficient and the caller must handle it; nothing else is computed then.
    """
    p = G.shape[0]
    gmax = float(np.max(np.diag(G)))
    floor = rank_tol * gmax

    F = [int(i) for i in support]
    in_f = np.zeros(p, dtype=bool)
    in_f[F] = True
    L = chol_build(G, F, rank_tol)
    empty = (np.zeros(0, dtype=np.intp), np.zeros(0, dtype=bool), np.zeros(0), np.zeros(0))
    if L is None:
        return np.zeros(0, dtype=np.intp), np.zeros(0), 0.0, *empty, False, False

    def solve_loss(L, idx):
        if len(idx) == 0:
            return np.zeros(0), max(0.5 * yty, 0.0)
        z = solve_triangular(L, c[idx], lower=True, check_finite=False)
        b = solve_triangular(L.T, z, lower=False, check_finite=False)
        return b, max(0.5 * (yty - float(b @ c[idx])), 0.0)

    beta_f, loss = solve_loss(L, F)

    t_index: list[int] = []
    t_is_add: list[bool] = []
    t_before: list[float] = []
    t_after: list[float] = []
    converged = False

    for _ in range(max_steps):
        m = len(F)
        current = loss + lam * m
        cand = np.full(p, np.inf)
        if m > 0:
            Linv = solve_triangular(L, np.eye(m), lower=True, check_finite=False)
            ginv_diag = np.einsum("ij,ij->j", Linv, Linv)
            cand[F] = loss + 0.5 * beta_f**2 / ginv_diag + lam * (m - 1)
        out = np.flatnonzero(~in_f)
        if out.size:
            Gfo = G[np.ix_(F, out)]
            if m > 0:
                V = solve_triangular(L, Gfo, lower=True, check_finite=False)
                s = np.diag(G)[out] - np.einsum("ij,ij->j", V, V)
                num = c[out] - beta_f @ Gfo
            else:
                s = np.diag(G)[out].copy()
                num = c[out].copy()
            gain = np.where(s > floor, 0.5 * num**2 / np.where(s > floor, s, 1.0), -np.inf)
            cand[out] = np.where(gain > -np.inf, loss - gain + lam * (m + 1), np.inf)

        j = int(np.argmin(cand))
        if not current - cand[j] >= min_improvement:
            converged = True
            break

        if in_f[j]:
            k = F.index(j)
            L = chol_delete(L, k)
            F.pop(k)
            in_f[j] = False
        else:
            idx = np.asarray(F, dtype=np.intp)
            L = chol_append(L, G[idx, j], float(G[j, j]), floor)
            F.append(j)
            in_f[j] = True
        beta_f, loss = solve_loss(L, F)
        after = loss + lam * len(F)
        t_index.append(j)
        t_is_add.append(bool(in_f[j]))
        t_before.append(current)
        t_after.append(after)

    return (
        np.asarray(F, dtype=np.intp),
        beta_f,
        loss,
        np.asarray(t_index, dtype=np.intp),
        np.asarray(t_is_add, dtype=bool),
        np.asarray(t_before),
        np.asarray(t_after),
        converged,
        True,
    )


def best_subset(G, c, yty, lam, rank_tol):
    """Exact subset-enumeration minimum via a Gray-code walk.

    Each step toggles one column in or out of the active factor. Columns
    that are numerically dependent on the current basis are carried in a
    skip set (they change the penalty but not the fit); removing a basis
    column while the skip set is non-empty forces a rebuild, so degenerate
    designs stay correct at the cost of speed.

    Returns (best_mask, best_objective, best_size).
    """
    p = G.shape[0]
    gmax = float(np.max(np.diag(G)))
    floor = rank_tol * gmax
    diag = np.diag(G).copy()

    F: list[int] = []
    skipped: set[int] = set()
    L = np.zeros((0, 0))
    loss = max(0.5 * yty, 0.0)

    best_mask = 0
    best_obj = loss
    best_size = 0

    def resolve(L, F):
        if not F:
            return max(0.5 * yty, 0.0)
        idx = np.asarray(F, dtype=np.intp)
        z = solve_triangular(L, c[idx], lower=True, check_finite=False)
        b = solve_triangular(L.T, z, lower=False, check_finite=False)
        return max(0.5 * (yty - float(b @ c[idx])), 0.0)

    def rebuild(mask):
        F2: list[int] = []
        skipped2: set[int] = set()
        L2 = np.zeros((0, 0))
        for i in range(p):
            if not (mask >> i) & 1:
                continue
            idx = np.asarray(F2, dtype=np.intp)
            L_try = chol_append(L2, G[idx, i], float(diag[i]), floor)
            if L_try is None:
                skipped2.add(i)
            else:
                L2 = L_try
                F2.append(i)
        return F2, skipped2, L2

    mask = 0
    size = 0
    for t in range(1, 1 << p):
        j = (t & -t).bit_length() - 1
        bit = 1 << j
        if mask & bit:
            mask ^= bit
            size -= 1
            if j in skipped:
                skipped.discard(j)
            elif skipped:
                F, skipped, L = rebuild(mask)
                loss = resolve(L, F)
            else:
                k = F.index(j)
                L = chol_delete(L, k)
                F.pop(k)
                loss = resolve(L, F)
        else:
            mask ^= bit
            size += 1
            idx = np.asarray(F, dtype=np.intp)
            L_try = chol_append(L, G[idx, j], float(diag[j]), floor)
            if L_try is None:
                skipped.add(j)
            else:
                L = L_try
                F.append(j)
                loss = resolve(L, F)
        obj = loss + lam * size
        if obj < best_obj:
            best_obj = obj
            best_mask = mask
            best_size = size
        elif obj == best_obj and best_mask != mask:
            if size < best_size:
                best_obj, best_mask, best_size = obj, mask, size
            elif size == best_size:
                low = ((mask ^ best_mask) & -(mask ^ best_mask)).bit_length() - 1
                if (mask >> low) & 1:  # lexicographically smaller support wins
                    best_obj, best_mask, best_size = obj, mask, size
    return best_mask, best_obj, best_size
