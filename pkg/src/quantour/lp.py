"""Dense primal simplex shared by the quantile-regression fits.

Standard form: minimize c.x subject to Ax = b, x >= 0.  Free variables
are handled by the callers through positive/negative splits, which is the
only bound structure the regression programs need.  Pricing is Dantzig
(most negative reduced cost, lowest index on ties) with a permanent switch
to Bland's rule after a stall, so termination is guaranteed; the leaving
row breaks ratio ties by the smallest basic-variable index.  All choices
depend only on variable indices and tableau values, which keeps the
returned solution invariant under row permutation of the input.

Both callers construct feasible bounded programs, so infeasibility or
unboundedness here means a construction bug and raises
InternalContractError.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InternalContractError, InvalidParameterError

__all__ = ["LinearProgram", "LPSolution", "lp_solve", "PIVOT_TOL"]

PIVOT_TOL = 1e-9

_STATUS_UNBOUNDED = 1
_STATUS_MAXITER = 2


@dataclass(frozen=True)
class LinearProgram:
    """minimize c @ x  subject to  A x = b, x >= 0."""

    c: np.ndarray
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=np.float64))
        c = np.asarray(self.c, dtype=np.float64).ravel()
        b = np.asarray(self.b, dtype=np.float64).ravel()
        if A.shape != (b.shape[0], c.shape[0]):
            raise InvalidParameterError("inconsistent LP shapes")
        if not (np.isfinite(A).all() and np.isfinite(b).all() and np.isfinite(c).all()):
            raise InvalidParameterError("LP data must be finite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def nrows(self):
        return self.A.shape[0]

    @property
    def ncols(self):
        return self.A.shape[1]


@dataclass(frozen=True)
class LPSolution:
    x: np.ndarray
    objective: float
    basis: np.ndarray
    iterations: int


def _pivot(T, basis, r, e):
    T[r] /= T[r, e]
    factors = T[:, e].copy()
    factors[r] = 0.0
    T -= factors[:, None] * T[r]
    T[:, e] = 0.0
    T[r, e] = 1.0
    basis[r] = e


def _run(T, basis, ncols_active, max_iter):
    stall_limit = max(64, 2 * (T.shape[0] + ncols_active))
    status, iters = _kernels.simplex_iterate(
        T, basis, ncols_active, PIVOT_TOL, max_iter, False, stall_limit)
    if status == _STATUS_UNBOUNDED:
        raise InternalContractError("linear program is unbounded")
    if status == _STATUS_MAXITER:
        raise InternalContractError("simplex iteration limit exceeded")
    return iters


def _reduce_cost_row(T, basis, c):
    m = T.shape[0] - 1
    T[m, :] = 0.0
    T[m, :c.shape[0]] = c
    for i in range(m):
        f = T[m, basis[i]]
        if f != 0.0:
            T[m] -= f * T[i]


def lp_solve(program: LinearProgram, basis=None, max_iter=None) -> LPSolution:
    """Optimal basic solution of a feasible bounded standard-form LP.

    ``basis`` may supply a starting basic feasible solution whose columns
    are already unit vectors in A (the regression builders do); otherwise
    a phase-1 run with artificial variables finds one, dropping redundant
    rows along the way.
    """
    A = program.A.copy()
    b = program.b.copy()
    c = program.c
    m, nc = A.shape
    if max_iter is None:
        max_iter = 200 * (m + nc) + 10_000

    neg = b < 0.0
    A[neg] *= -1.0
    b[neg] *= -1.0

    total_iters = 0
    if basis is None:
        # phase 1: minimize the sum of artificials
        T = np.zeros((m + 1, nc + m + 1))
        T[:m, :nc] = A
        T[:m, nc:nc + m] = np.eye(m)
        T[:m, -1] = b
        basis = np.arange(nc, nc + m, dtype=np.int64)
        T[m, :nc] = -A.sum(axis=0)
        T[m, -1] = -b.sum()
        total_iters += _run(T, basis, nc + m, max_iter)
        if -T[m, -1] > PIVOT_TOL * (1.0 + abs(b).sum()):
            raise InternalContractError("linear program is infeasible")

        # drive artificials out of the basis; all-zero rows are redundant
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if basis[i] >= nc:
                row = T[i, :nc]
                piv = np.flatnonzero(np.abs(row) > PIVOT_TOL)
                if piv.size:
                    _pivot(T, basis, i, int(piv[0]))
                else:
                    keep[i] = False
        rows = np.flatnonzero(keep)
        m2 = rows.size
        T2 = np.zeros((m2 + 1, nc + 1))
        T2[:m2, :nc] = T[rows, :nc]
        T2[:m2, -1] = T[rows, -1]
        basis = basis[rows].copy()
        T = T2
    else:
        basis = np.asarray(basis, dtype=np.int64).copy()
        if basis.shape[0] != m:
            raise InvalidParameterError("basis must have one entry per row")
        T = np.zeros((m + 1, nc + 1))
        T[:m, :nc] = A
        T[:m, -1] = b

    _reduce_cost_row(T, basis, c)
    total_iters += _run(T, basis, nc, max_iter)

    mf = T.shape[0] - 1
    x = np.zeros(nc)
    x[basis] = T[:mf, -1]
    return LPSolution(x=x, objective=float(c @ x), basis=basis,
                      iterations=total_iters)
