# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops.

Two kernels live here:

* ``directional_offsets`` -- for each direction u(theta) project the point
  cloud onto u and take the k-th smallest projection.  This is the O(nK)
  inner loop of contour construction and has to handle n in the millions.
* ``simplex_iterate`` -- dense full-tableau primal simplex pivoting, the
  backend of the quantile-regression linear programs.

Both have pure-numpy twins in ``quantour._kernels._ref``; the algorithms
(pivot rules, tie-breaking, arithmetic order) are kept identical so the
backends agree to the last bit on the same input.
"""

import numpy as np

cimport numpy as cnp
cimport openmp
from cython.parallel cimport prange
from libc.math cimport cos, sin, sqrt
from libc.math cimport INFINITY

cnp.import_array()


cdef double _kth_smallest(double* a, Py_ssize_t n, Py_ssize_t k) noexcept nogil:
    """k-th smallest element (0-based k) of a[0:n]; reorders a in place.

    Iterative quickselect with median-of-three pivot and Hoare partition.
    """
    cdef Py_ssize_t lo = 0, hi = n - 1, i, j, mid
    cdef double pivot, tmp
    while hi > lo:
        mid = lo + (hi - lo) // 2
        # order a[lo] <= a[mid] <= a[hi]
        if a[mid] < a[lo]:
            tmp = a[mid]; a[mid] = a[lo]; a[lo] = tmp
        if a[hi] < a[lo]:
            tmp = a[hi]; a[hi] = a[lo]; a[lo] = tmp
        if a[hi] < a[mid]:
            tmp = a[hi]; a[hi] = a[mid]; a[mid] = tmp
        if hi - lo <= 2:
            break
        pivot = a[mid]
        i = lo
        j = hi
        while i <= j:
            while a[i] < pivot:
                i += 1
            while a[j] > pivot:
                j -= 1
            if i <= j:
                tmp = a[i]; a[i] = a[j]; a[j] = tmp
                i += 1
                j -= 1
        if k <= j:
            hi = j
        elif k >= i:
            lo = i
        else:
            return a[k]
    return a[k]


cdef Py_ssize_t _SMALL_N = 16384
cdef Py_ssize_t _SAMPLE_TARGET = 4096
cdef Py_ssize_t _SAMPLE_CAP = 8192


cdef double _direction_offset(const double* pts, Py_ssize_t n, double ux,
                              double uy, Py_ssize_t k, double* scratch,
                              double* samp) noexcept nogil:
    """k-th smallest (0-based) projection onto (ux, uy); one direction.

    For large n a strided sample brackets the target order statistic, so a
    single streaming pass counts below the bracket and collects only the
    in-band candidates (Floyd-Rivest style).  The band is verified by exact
    counts; if the sample misled us (pathological data layouts) we fall
    back to a full quickselect, so the result is always exact.
    """
    cdef Py_ssize_t i, stride, s, lo_idx, hi_idx, margin, c_lo, nc
    cdef double w, qlo, qhi, p

    if n < _SMALL_N:
        for i in range(n):
            scratch[i] = ux * pts[2 * i] + uy * pts[2 * i + 1]
        return _kth_smallest(scratch, n, k)

    stride = n // _SAMPLE_TARGET
    s = n // stride
    for i in range(s):
        samp[i] = ux * pts[2 * i * stride] + uy * pts[2 * i * stride + 1]
    p = (<double> (k + 1)) / (<double> n)
    margin = <Py_ssize_t> (5.0 * sqrt((<double> s) * p * (1.0 - p))) + 16
    lo_idx = <Py_ssize_t> (p * s) - margin
    hi_idx = <Py_ssize_t> (p * s) + margin
    if hi_idx > s - 1:
        hi_idx = s - 1
    qhi = _kth_smallest(samp, s, hi_idx)
    if hi_idx == s - 1:
        qhi = INFINITY
    if lo_idx <= 0:
        qlo = -INFINITY
    else:
        qlo = _kth_smallest(samp, s, lo_idx)

    c_lo = 0
    nc = 0
    for i in range(n):
        w = ux * pts[2 * i] + uy * pts[2 * i + 1]
        if w < qlo:
            c_lo += 1
        elif w <= qhi:
            scratch[nc] = w
            nc += 1
    if c_lo <= k < c_lo + nc:
        return _kth_smallest(scratch, nc, k - c_lo)

    # sample band missed the target rank entirely; exact fallback
    for i in range(n):
        scratch[i] = ux * pts[2 * i] + uy * pts[2 * i + 1]
    return _kth_smallest(scratch, n, k)


def directional_offsets(const double[:, ::1] points, const double[::1] thetas,
                        Py_ssize_t k, int num_threads=0):
    """offsets[j] = k-th smallest of {points[i] . (cos t_j, sin t_j)}.

    ``k`` is 1-based (the order-statistic index).  Directions are processed
    independently; with OpenMP each thread works in its own scratch row, so
    the output never depends on the schedule.
    """
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t K = thetas.shape[0]
    if n == 0:
        raise ValueError("empty point set")
    if k < 1 or k > n:
        raise ValueError("order statistic index out of range")

    out_arr = np.empty(K, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef int nt = num_threads if num_threads > 0 else openmp.omp_get_max_threads()
    if nt > K:
        nt = <int> K
    if nt < 1:
        nt = 1
    scratch_arr = np.empty((nt, n), dtype=np.float64)
    samp_arr = np.empty((nt, _SAMPLE_CAP), dtype=np.float64)
    cdef double[:, ::1] scratch = scratch_arr
    cdef double[:, ::1] samp = samp_arr
    cdef Py_ssize_t j, tid
    cdef const double* pts = &points[0, 0]

    with nogil:
        for j in prange(K, schedule='static', num_threads=nt):
            tid = openmp.omp_get_thread_num()
            out[j] = _direction_offset(pts, n, cos(thetas[j]), sin(thetas[j]),
                                       k - 1, &scratch[tid, 0], &samp[tid, 0])
    return out_arr


def min_margins(const double[:, ::1] queries, const double[::1] thetas,
                const double[::1] offsets):
    """margins[q] = min_j (queries[q] . u(theta_j) - offsets[j]).

    Signed slack of each query point against a family of halfplanes
    u . x >= offset; used by the dense membership oracle.
    """
    cdef Py_ssize_t Q = queries.shape[0]
    cdef Py_ssize_t K = thetas.shape[0]
    out_arr = np.empty(Q, dtype=np.float64)
    cdef double[::1] out = out_arr
    ux_arr = np.cos(np.asarray(thetas))
    uy_arr = np.sin(np.asarray(thetas))
    cdef double[::1] ux = ux_arr
    cdef double[::1] uy = uy_arr
    cdef Py_ssize_t q, j
    cdef double best, m, px, py
    with nogil:
        for q in prange(Q, schedule='static'):
            px = queries[q, 0]
            py = queries[q, 1]
            best = ux[0] * px + uy[0] * py - offsets[0]
            for j in range(1, K):
                m = ux[j] * px + uy[j] * py - offsets[j]
                if m < best:
                    best = m
            out[q] = best
    return out_arr


STATUS_OPTIMAL = 0
STATUS_UNBOUNDED = 1
STATUS_MAXITER = 2


def simplex_iterate(double[:, ::1] T, long[::1] basis, Py_ssize_t ncols_active,
                    double tol, long max_iter, bint bland, long stall_limit):
    """Primal simplex pivots on tableau ``T`` in place.

    Layout: rows 0..m-1 hold [A | b] reduced w.r.t. ``basis`` (b >= 0),
    row m holds the reduced-cost row with -objective in the last cell.
    Entering rule: most negative reduced cost, lowest column index on ties
    (Dantzig); switches permanently to Bland's rule after ``stall_limit``
    pivots without objective improvement, which guarantees termination.
    Leaving rule: minimum ratio, ties broken by smallest basic variable
    index.  Only columns < ncols_active are priced.

    Returns (status, iterations).
    """
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t rhs = T.shape[1] - 1
    cdef Py_ssize_t it, e, i, j, r
    cdef double rc, best_rc, ratio, best_ratio, piv, f, obj, best_obj
    cdef long best_basis, stall = 0

    best_obj = -T[m, rhs]
    for it in range(max_iter):
        # entering column
        e = -1
        if bland:
            for j in range(ncols_active):
                if T[m, j] < -tol:
                    e = j
                    break
        else:
            best_rc = -tol
            for j in range(ncols_active):
                rc = T[m, j]
                if rc < best_rc:
                    best_rc = rc
                    e = j
        if e < 0:
            return STATUS_OPTIMAL, it

        # ratio test
        r = -1
        best_ratio = 0.0
        best_basis = 0
        for i in range(m):
            if T[i, e] > tol:
                ratio = T[i, rhs] / T[i, e]
                if r < 0 or ratio < best_ratio or \
                        (ratio == best_ratio and basis[i] < best_basis):
                    r = i
                    best_ratio = ratio
                    best_basis = basis[i]
        if r < 0:
            return STATUS_UNBOUNDED, it

        # pivot on (r, e)
        piv = T[r, e]
        for j in range(rhs + 1):
            T[r, j] /= piv
        for i in range(m + 1):
            if i == r:
                continue
            f = T[i, e]
            if f != 0.0:
                for j in range(rhs + 1):
                    T[i, j] -= f * T[r, j]
        for i in range(m + 1):
            T[i, e] = 0.0
        T[r, e] = 1.0
        basis[r] = e

        if not bland:
            obj = -T[m, rhs]
            if obj < best_obj - tol * (1.0 + (best_obj if best_obj > 0 else -best_obj)):
                best_obj = obj
                stall = 0
            else:
                stall += 1
                if stall >= stall_limit:
                    bland = True
    return STATUS_MAXITER, max_iter
