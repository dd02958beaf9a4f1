# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: coordinate descent, stepwise support search, and
Gray-code subset enumeration. Same contracts and guards as `_pykernels`."""

from libc.math cimport INFINITY, fabs, hypot, sqrt

import numpy as np

BACKEND_NAME = "compiled"


cdef inline double _dot(const double* a, const double* b, Py_ssize_t n) nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t i
    for i in range(n):
        acc += a[i] * b[i]
    return acc


def cd_fit(double[::1, :] X, double[::1] y, double lam, double[::1] beta,
           Py_ssize_t max_iters, double tol):
    """Cyclic coordinate descent with active-set sweeps; beta in place.

    Returns (sweeps, converged, per-sweep objectives).
    """
    cdef Py_ssize_t n = X.shape[0], p = X.shape[1]
    cdef double[::1] norm2 = np.empty(p)
    cdef double[::1] r = np.empty(n)
    objectives_arr = np.empty(max_iters)
    cdef double[::1] objectives = objectives_arr
    cdef Py_ssize_t[::1] active = np.empty(p, dtype=np.intp)
    cdef Py_ssize_t sweeps = 0, na = 0, i, j, t, count
    cdef bint converged = False, full = True
    cdef double bj, rho, bn, d, maxd, obj, nj

    for j in range(p):
        norm2[j] = _dot(&X[0, j], &X[0, j], n)
    for i in range(n):
        r[i] = y[i]
    for j in range(p):
        bj = beta[j]
        if bj != 0.0:
            for i in range(n):
                r[i] -= X[i, j] * bj

    while sweeps < max_iters:
        maxd = 0.0
        count = p if full else na
        for t in range(count):
            j = t if full else active[t]
            nj = norm2[j]
            if nj <= 0.0:
                continue
            bj = beta[j]
            rho = _dot(&X[0, j], &r[0], n) + nj * bj
            if rho > lam:
                bn = (rho - lam) / nj
            elif rho < -lam:
                bn = (rho + lam) / nj
            else:
                bn = 0.0
            d = bn - bj
            if d != 0.0:
                for i in range(n):
                    r[i] -= d * X[i, j]
                beta[j] = bn
            if fabs(d) > maxd:
                maxd = fabs(d)
        obj = 0.5 * _dot(&r[0], &r[0], n)
        for j in range(p):
            obj += lam * fabs(beta[j])
        objectives[sweeps] = obj
        sweeps += 1
        if full:
            if maxd < tol:
                converged = True
                break
            na = 0
            for j in range(p):
                if beta[j] != 0.0:
                    active[na] = j
                    na += 1
            full = na == 0 or na == p
        elif maxd < tol:
            full = True
    return sweeps, converged, objectives_arr[:sweeps].copy()


cdef inline void _forward_solve(double[:, ::1] L, double* rhs, double* out, Py_ssize_t m) nogil:
    cdef Py_ssize_t t, u
    cdef double acc
    for t in range(m):
        acc = rhs[t]
        for u in range(t):
            acc -= L[t, u] * out[u]
        out[t] = acc / L[t, t]


cdef inline void _backward_solve(double[:, ::1] L, double* rhs, double* out, Py_ssize_t m) nogil:
    # solves L^T out = rhs
    cdef Py_ssize_t t, u
    cdef double acc
    for t in range(m - 1, -1, -1):
        acc = rhs[t]
        for u in range(t + 1, m):
            acc -= L[u, t] * out[u]
        out[t] = acc / L[t, t]


cdef inline double _solve_beta(double[:, ::1] L, double[:, ::1] G, double[::1] c,
                               double yty, Py_ssize_t* F, Py_ssize_t m,
                               double* beta_f, double* scratch) nogil:
    """Solve for the active coefficients; returns the residual loss."""
    cdef Py_ssize_t t
    cdef double loss
    if m == 0:
        loss = 0.5 * yty
        return loss if loss > 0.0 else 0.0
    for t in range(m):
        scratch[t] = c[F[t]]
    _forward_solve(L, scratch, beta_f, m)
    for t in range(m):
        scratch[t] = beta_f[t]
    _backward_solve(L, scratch, beta_f, m)
    loss = yty
    for t in range(m):
        loss -= beta_f[t] * c[F[t]]
    loss *= 0.5
    return loss if loss > 0.0 else 0.0


cdef inline double _append_pivot(double[:, ::1] L, double[:, ::1] G, Py_ssize_t* F,
                                 Py_ssize_t m, Py_ssize_t j, double* v) nogil:
    """Forward-solve the new column into v; returns the Schur pivot."""
    cdef Py_ssize_t t, u
    cdef double acc, s
    for t in range(m):
        acc = G[F[t], j]
        for u in range(t):
            acc -= L[t, u] * v[u]
        v[t] = acc / L[t, t]
    s = G[j, j]
    for t in range(m):
        s -= v[t] * v[t]
    return s


cdef inline void _chol_delete_c(double[:, ::1] L, Py_ssize_t k, Py_ssize_t m, double* u) nogil:
    """Remove row/col k from the leading m x m factor in place."""
    cdef Py_ssize_t q = m - 1 - k
    cdef Py_ssize_t i, t, col
    cdef double told, rr, cc, ss, val
    for i in range(q):
        u[i] = L[k + 1 + i, k]
    for i in range(k + 1, m):
        for col in range(k):
            L[i - 1, col] = L[i, col]
    for i in range(q):
        told = L[k + 1 + i, k + 1 + i]
        rr = hypot(told, u[i])
        cc = rr / told
        ss = u[i] / told
        L[k + i, k + i] = rr
        for t in range(i + 1, q):
            val = (L[k + 1 + t, k + 1 + i] + ss * u[t]) / cc
            L[k + t, k + i] = val
            u[t] = cc * u[t] - ss * val


def stepwise_search(double[:, ::1] G, double[::1] c, double yty, double lam,
                    Py_ssize_t[::1] support, double min_improvement,
                    Py_ssize_t max_steps, double rank_tol):
    """Greedy single-index support search; see the pure twin for semantics."""
    cdef Py_ssize_t p = G.shape[0]
    cdef Py_ssize_t m0 = support.shape[0]
    cdef Py_ssize_t i, j, k, t, m, best_j, step
    cdef double gmax = 0.0, floor_, s, num, cand, best_obj, current, loss, after

    for j in range(p):
        if G[j, j] > gmax:
            gmax = G[j, j]
    floor_ = rank_tol * gmax

    L_arr = np.zeros((p, p))
    cdef double[:, ::1] L = L_arr
    F_arr = np.empty(p, dtype=np.intp)
    cdef Py_ssize_t[::1] F = F_arr
    pos_arr = np.full(p, -1, dtype=np.intp)
    cdef Py_ssize_t[::1] pos = pos_arr
    cdef double[::1] beta_f = np.zeros(p)
    cdef double[::1] v = np.empty(p)
    cdef double[::1] scratch = np.empty(p)
    cdef double[::1] ginv = np.empty(p)
    cdef double[::1] w = np.empty(p)

    empty_i = np.zeros(0, dtype=np.intp)
    empty_b = np.zeros(0, dtype=bool)
    empty_f = np.zeros(0)

    # build the initial factor by appends, with the same pivot guard
    m = 0
    for i in range(m0):
        j = support[i]
        s = _append_pivot(L, G, &F[0], m, j, &v[0])
        if s <= floor_:
            return empty_i, empty_f, 0.0, empty_i, empty_b, empty_f, empty_f, False, False
        for t in range(m):
            L[m, t] = v[t]
        L[m, m] = sqrt(s)
        F[m] = j
        pos[j] = m
        m += 1

    loss = _solve_beta(L, G, c, yty, &F[0], m, &beta_f[0], &scratch[0])

    t_index_arr = np.empty(max_steps, dtype=np.intp)
    t_isadd_arr = np.empty(max_steps, dtype=bool)
    t_before_arr = np.empty(max_steps)
    t_after_arr = np.empty(max_steps)
    cdef Py_ssize_t[::1] t_index = t_index_arr
    cdef char[::1] t_isadd = t_isadd_arr.view(np.int8)
    cdef double[::1] t_before = t_before_arr
    cdef double[::1] t_after = t_after_arr
    cdef Py_ssize_t n_steps = 0
    cdef bint converged = False

    for step in range(max_steps):
        current = loss + lam * m
        # diagonal of the inverse active Gram: column norms of L^{-1}
        for k in range(m):
            for t in range(m):
                scratch[t] = 1.0 if t == k else 0.0
            _forward_solve(L, &scratch[0], &w[0], m)
            ginv[k] = _dot(&w[k], &w[k], m - k)
        best_obj = INFINITY
        best_j = -1
        for j in range(p):
            k = pos[j]
            if k >= 0:
                cand = loss + 0.5 * beta_f[k] * beta_f[k] / ginv[k] + lam * (m - 1)
            else:
                s = _append_pivot(L, G, &F[0], m, j, &v[0])
                if s <= floor_:
                    continue
                num = c[j]
                for t in range(m):
                    num -= G[j, F[t]] * beta_f[t]
                cand = loss - 0.5 * num * num / s + lam * (m + 1)
            if cand < best_obj:
                best_obj = cand
                best_j = j
        if not current - best_obj >= min_improvement:
            converged = True
            break
        k = pos[best_j]
        if k >= 0:
            _chol_delete_c(L, k, m, &w[0])
            for t in range(k, m - 1):
                F[t] = F[t + 1]
                pos[F[t]] = t
            pos[best_j] = -1
            m -= 1
        else:
            s = _append_pivot(L, G, &F[0], m, best_j, &v[0])
            for t in range(m):
                L[m, t] = v[t]
            L[m, m] = sqrt(s)
            F[m] = best_j
            pos[best_j] = m
            m += 1
        loss = _solve_beta(L, G, c, yty, &F[0], m, &beta_f[0], &scratch[0])
        after = loss + lam * m
        t_index[n_steps] = best_j
        t_isadd[n_steps] = 1 if pos[best_j] >= 0 else 0
        t_before[n_steps] = current
        t_after[n_steps] = after
        n_steps += 1

    return (
        F_arr[:m].copy(),
        np.asarray(beta_f[:m]).copy(),
        loss,
        t_index_arr[:n_steps].copy(),
        t_isadd_arr[:n_steps].copy(),
        t_before_arr[:n_steps].copy(),
        t_after_arr[:n_steps].copy(),
        converged,
        True,
    )


def best_subset(double[:, ::1] G, double[::1] c, double yty, double lam, double rank_tol):
    """Gray-code walk over all 2^p supports with incremental factor updates.

    Dependent columns ride in a skip set; removing a basis column while the
    skip set is non-empty rebuilds the factor, so degenerate designs stay
    correct. Returns (best_mask, best_objective, best_size).
    """
    cdef Py_ssize_t p = G.shape[0]
    cdef Py_ssize_t i, j, k, t, m, size
    cdef double gmax = 0.0, floor_, s, loss, obj, best_obj
    cdef unsigned long long mask = 0, best_mask = 0, tt, total, diff, lowbit
    cdef Py_ssize_t best_size = 0, skip_count = 0

    for j in range(p):
        if G[j, j] > gmax:
            gmax = G[j, j]
    floor_ = rank_tol * gmax

    L_arr = np.zeros((p, p))
    cdef double[:, ::1] L = L_arr
    cdef Py_ssize_t[::1] F = np.empty(p, dtype=np.intp)
    cdef Py_ssize_t[::1] pos = np.full(p, -1, dtype=np.intp)
    cdef char[::1] skip = np.zeros(p, dtype=np.int8)
    cdef double[::1] beta_f = np.zeros(p)
    cdef double[::1] v = np.empty(p)
    cdef double[::1] scratch = np.empty(p)
    cdef double[::1] w = np.empty(p)

    m = 0
    size = 0
    loss = 0.5 * yty
    if loss < 0.0:
        loss = 0.0
    best_obj = loss

    total = (<unsigned long long>1) << p
    tt = 1
    while tt < total:
        # trailing-zero count gives the toggled column
        j = 0
        while not (tt >> j) & 1:
            j += 1
        if (mask >> j) & 1:
            mask ^= (<unsigned long long>1) << j
            size -= 1
            if skip[j]:
                skip[j] = 0
                skip_count -= 1
            elif skip_count > 0:
                # a dependent column may become independent: rebuild
                m = 0
                skip_count = 0
                for i in range(p):
                    skip[i] = 0
                    pos[i] = -1
                for i in range(p):
                    if not (mask >> i) & 1:
                        continue
                    s = _append_pivot(L, G, &F[0], m, i, &v[0])
                    if s <= floor_:
                        skip[i] = 1
                        skip_count += 1
                    else:
                        for t in range(m):
                            L[m, t] = v[t]
                        L[m, m] = sqrt(s)
                        F[m] = i
                        pos[i] = m
                        m += 1
                loss = _solve_beta(L, G, c, yty, &F[0], m, &beta_f[0], &scratch[0])
            else:
                k = pos[j]
                _chol_delete_c(L, k, m, &w[0])
                for t in range(k, m - 1):
                    F[t] = F[t + 1]
                    pos[F[t]] = t
                pos[j] = -1
                m -= 1
                loss = _solve_beta(L, G, c, yty, &F[0], m, &beta_f[0], &scratch[0])
        else:
            mask ^= (<unsigned long long>1) << j
            size += 1
            s = _append_pivot(L, G, &F[0], m, j, &v[0])
            if s <= floor_:
                skip[j] = 1
                skip_count += 1
            else:
                for t in range(m):
                    L[m, t] = v[t]
                L[m, m] = sqrt(s)
                F[m] = j
                pos[j] = m
                m += 1
                loss = _solve_beta(L, G, c, yty, &F[0], m, &beta_f[0], &scratch[0])
        obj = loss + lam * size
        if obj < best_obj:
            best_obj = obj
            best_mask = mask
            best_size = size
        elif obj == best_obj and best_mask != mask:
            if size < best_size:
                best_obj = obj
                best_mask = mask
                best_size = size
            elif size == best_size:
                diff = mask ^ best_mask
                lowbit = diff & (~diff + 1)
                if mask & lowbit:  # lexicographically smaller support wins
                    best_obj = obj
                    best_mask = mask
                    best_size = size
        tt += 1
    return int(best_mask), best_obj, int(best_size)
