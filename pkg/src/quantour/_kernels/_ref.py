"""Pure-numpy reference implementations of the hot kernels.

Selected automatically when the compiled extension is not available (or
when forced via ``QUANTOUR_BACKEND=python``).  Algorithms, tie-breaking and
arithmetic order mirror ``_fast.pyx`` so results match across backends.
"""

import numpy as np

STATUS_OPTIMAL = 0
STATUS_UNBOUNDED = 1
STATUS_MAXITER = 2

# direction chunk sized so one projection block stays ~64 MB
_CHUNK_BUDGET = 8_000_000


def directional_offsets(points, thetas, k, num_threads=0):
    """offsets[j] = k-th smallest of the projections onto u(thetas[j]).

    ``k`` is 1-based.  Works in direction chunks: each chunk is a (c, n)
    row-contiguous projection block so the per-row partition stays cache
    friendly.
    """
    points = np.ascontiguousarray(points, dtype=np.float64)
    thetas = np.asarray(thetas, dtype=np.float64)
    n = points.shape[0]
    if n == 0:
        raise ValueError("empty point set")
    if not 1 <= k <= n:
        raise ValueError("order statistic index out of range")
    K = thetas.shape[0]
    out = np.empty(K)
    chunk = max(1, _CHUNK_BUDGET // max(n, 1))
    px, py = points[:, 0], points[:, 1]
    for s in range(0, K, chunk):
        t = thetas[s:s + chunk]
        # elementwise (not BLAS) so projections match the compiled kernel
        # bit for bit; dgemm would fuse multiply-adds
        w = np.cos(t)[:, None] * px
        w += np.sin(t)[:, None] * py
        out[s:s + chunk] = np.partition(w, k - 1, axis=1)[:, k - 1]
    return out


def min_margins(queries, thetas, offsets):
    """margins[q] = min_j (queries[q] . u(theta_j) - offsets[j])."""
    queries = np.ascontiguousarray(queries, dtype=np.float64)
    thetas = np.asarray(thetas, dtype=np.float64)
    offsets = np.asarray(offsets, dtype=np.float64)
    Q = queries.shape[0]
    out = np.full(Q, np.inf)
    chunk = max(1, _CHUNK_BUDGET // max(Q, 1))
    for s in range(0, len(thetas), chunk):
        t = thetas[s:s + chunk]
        u = np.empty((2, t.shape[0]))
        u[0] = np.cos(t)
        u[1] = np.sin(t)
        m = queries @ u - offsets[s:s + chunk]
        np.minimum(out, m.min(axis=1), out=out)
    return out


def simplex_iterate(T, basis, ncols_active, tol, max_iter, bland, stall_limit):
    """Primal simplex pivots on tableau T in place; see _fast.simplex_iterate."""
    m = T.shape[0] - 1
    rhs = T.shape[1] - 1
    cost = T[m]
    stall = 0
    best_obj = -T[m, rhs]
    for it in range(max_iter):
        rc = cost[:ncols_active]
        if bland:
            neg = np.flatnonzero(rc < -tol)
            if neg.size == 0:
                return STATUS_OPTIMAL, it
            e = int(neg[0])
        else:
            e = int(np.argmin(rc))
            if rc[e] >= -tol:
                return STATUS_OPTIMAL, it

        col = T[:m, e]
        pos = col > tol
        if not pos.any():
            return STATUS_UNBOUNDED, it
        ratios = np.full(m, np.inf)
        ratios[pos] = T[:m, rhs][pos] / col[pos]
        best = ratios.min()
        ties = np.flatnonzero(ratios == best)
        r = int(ties[np.argmin(basis[ties])])

        piv = T[r, e]
        T[r] /= piv
        factors = T[:, e].copy()
        factors[r] = 0.0
        T -= factors[:, None] * T[r]
        T[:, e] = 0.0
        T[r, e] = 1.0
        basis[r] = e

        if not bland:
            obj = -T[m, rhs]
            if obj < best_obj - tol * (1.0 + abs(best_obj)):
                best_obj = obj
                stall = 0
            else:
                stall += 1
                if stall >= stall_limit:
                    bland = True
    return STATUS_MAXITER, max_iter
