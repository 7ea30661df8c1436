"""Check-loss optimization.

Three fits, all solved through the shared simplex backend in
:mod:`quantour.lp`:

* ``qr_linear`` -- linear quantile regression, the LP
  min tau.sum(u) + (1-tau).sum(v)  s.t.  y_k = a + b z_k + u_k - v_k.
* ``directional_regression_quantile`` -- the same fit after rotating the
  cloud so a chosen direction becomes the ordinate.
* ``qr_tv`` -- univariate nonparametric quantile regression: continuous
  piecewise-linear f with knots at the distinct covariate values,
  penalized by the total variation of its derivative (the sum of absolute
  slope changes), weight lambda.

With all abscissas equal the design carries no slope information and the
fit raises SingularDesignError, mirroring how stock quantile-regression
code exits on a singular design; seeded perturbation (see the CLI) is the
documented remedy.

Non-unique optima: the solver returns the first optimal basic solution
under its deterministic pivot ordering; it is one element of the solution
set, not a canonical choice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    InsufficientDataError,
    InvalidParameterError,
    SingularDesignError,
)
from .lp import LinearProgram, lp_solve
from .projquant import Dataset, Direction, QuantileLevel

__all__ = [
    "CheckLoss",
    "LineFit",
    "DirectionalLineFit",
    "PiecewiseLinearFit",
    "rho_tau",
    "qr_linear",
    "directional_regression_quantile",
    "qr_tv",
    "lp_solve",
    "LinearProgram",
]


def rho_tau(r, level: QuantileLevel):
    """Check loss rho_tau(r) = r * (tau - 1{r < 0}); nonnegative, zero iff r=0."""
    r = np.asarray(r, dtype=np.float64)
    out = r * (level.tau - (r < 0.0))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CheckLoss:
    """Callable check loss at a fixed level."""

    level: QuantileLevel

    def __call__(self, r):
        return rho_tau(r, self.level)

    def total(self, r):
        return float(np.sum(rho_tau(r, self.level)))


@dataclass(frozen=True)
class LineFit:
    """Fitted line y = intercept + slope * z with its check-loss objective."""

    intercept: float
    slope: float
    objective: float

    def predict(self, z):
        return self.intercept + self.slope * np.asarray(z, dtype=np.float64)


@dataclass(frozen=True)
class DirectionalLineFit:
    """Regression quantile in the frame where ``direction`` is the ordinate.

    ``fit`` lives in the rotated frame (ordinate y_u = u.p regressed on
    abscissa z_u = u_perp.p); ``line_normal``/``line_offset`` describe the
    same fitted line back in the original frame as {x : n.x = offset} with
    unit n.
    """

    direction: Direction
    fit: LineFit
    line_normal: np.ndarray
    line_offset: float


def _prepare_pairs(pairs):
    zy = np.atleast_2d(np.asarray(pairs, dtype=np.float64))
    if zy.ndim != 2 or zy.shape[1] != 2:
        raise InvalidParameterError("pairs must be an (n, 2) array of (z, y)")
    if not np.isfinite(zy).all():
        raise InvalidParameterError("pairs must be finite")
    return zy[:, 0], zy[:, 1]


def qr_linear(pairs, level: QuantileLevel) -> LineFit:
    """Linear quantile regression of y on z via the standard LP.

    In general position the optimal line interpolates two data points.
    All z equal raises SingularDesignError.
    """
    z, y = _prepare_pairs(pairs)
    n = z.shape[0]
    if n < 2:
        raise InsufficientDataError("qr_linear needs at least 2 points")
    if np.ptp(z) == 0.0:
        raise SingularDesignError("design matrix is singular: all z equal")
    tau = level.tau

    # columns: a+, a-, b+, b-, u_1..u_n, v_1..v_n
    nc = 4 + 2 * n
    A = np.zeros((n, nc))
    A[:, 0] = 1.0
    A[:, 1] = -1.0
    A[:, 2] = z
    A[:, 3] = -z
    rows = np.arange(n)
    A[rows, 4 + rows] = 1.0
    A[rows, 4 + n + rows] = -1.0
    c = np.zeros(nc)
    c[4:4 + n] = tau
    c[4 + n:] = 1.0 - tau
    basis = np.where(y >= 0.0, 4 + rows, 4 + n + rows).astype(np.int64)

    sol = lp_solve(LinearProgram(c, A, y), basis=basis)
    a = sol.x[0] - sol.x[1]
    b = sol.x[2] - sol.x[3]
    objective = float(np.sum(rho_tau(y - (a + b * z), level)))
    return LineFit(intercept=a, slope=b, objective=objective)


def directional_regression_quantile(data: Dataset, direction: Direction,
                                    level: QuantileLevel) -> DirectionalLineFit:
    """Rotate so ``direction`` is the ordinate, then fit qr_linear.

    Collinear data aligned with the direction leaves the rotated abscissa
    constant and propagates SingularDesignError.
    """
    u = direction.vector
    u_perp = np.array([u[1], -u[0]])
    y_u = data.points @ u
    z_u = data.points @ u_perp
    fit = qr_linear(np.column_stack([z_u, y_u]), level)
    # u.p - slope * (u_perp.p) = intercept, normalized to a unit normal
    normal = u - fit.slope * u_perp
    norm = float(np.hypot(normal[0], normal[1]))
    return DirectionalLineFit(
        direction=direction,
        fit=fit,
        line_normal=normal / norm,
        line_offset=fit.intercept / norm,
    )


@dataclass(frozen=True)
class PiecewiseLinearFit:
    """Continuous piecewise-linear quantile curve from qr_tv.

    Knots sit at the distinct covariate values; between knots the fit is
    the linear interpolant and beyond the range it continues the end
    slope.  ``loss`` and ``penalty`` are the two objective terms,
    ``objective = loss + penalty_weight * penalty``.
    """

    knots: np.ndarray
    values: np.ndarray
    penalty_weight: float
    objective: float
    loss: float
    penalty: float

    def __post_init__(self):
        k = np.asarray(self.knots, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "knots", k)
        object.__setattr__(self, "values", v)

    def evaluate(self, x):
        x = np.asarray(x, dtype=np.float64)
        scalar = x.ndim == 0
        xq = np.atleast_1d(x)
        out = np.interp(xq, self.knots, self.values)
        k, v = self.knots, self.values
        lo = xq < k[0]
        hi = xq > k[-1]
        if lo.any():
            s0 = (v[1] - v[0]) / (k[1] - k[0])
            out[lo] = v[0] + s0 * (xq[lo] - k[0])
        if hi.any():
            s1 = (v[-1] - v[-2]) / (k[-1] - k[-2])
            out[hi] = v[-1] + s1 * (xq[hi] - k[-1])
        return float(out[0]) if scalar else out

    def extrapolates(self, x):
        """True where evaluation at x leaves the knot range."""
        x = np.asarray(x, dtype=np.float64)
        out = (x < self.knots[0]) | (x > self.knots[-1])
        return bool(out) if out.ndim == 0 else out

    def slope_changes(self):
        slopes = np.diff(self.values) / np.diff(self.knots)
        return np.diff(slopes)


def qr_tv(pairs, level: QuantileLevel, penalty_weight: float) -> PiecewiseLinearFit:
    """TV-penalized univariate quantile regression.

    Minimizes sum_k rho_tau(w_k - f(x_k)) + lambda * sum |slope changes|
    over continuous piecewise-linear f with knots at the distinct x
    values, as one LP.  Duplicate x share a knot (their losses add);
    fewer than 2 distinct x raises InsufficientDataError, negative lambda
    InvalidParameterError.
    """
    x, w = _prepare_pairs(pairs)
    lam = float(penalty_weight)
    if not np.isfinite(lam) or lam < 0.0:
        raise InvalidParameterError(f"penalty weight must be >= 0, got {penalty_weight!r}")
    knots, inverse = np.unique(x, return_inverse=True)
    m = knots.shape[0]
    n = x.shape[0]
    if m < 2:
        raise InsufficientDataError("qr_tv needs at least 2 distinct x values")
    tau = level.tau
    h = np.diff(knots)
    n_slope = m - 2

    # columns: g+_0..g+_{m-1}, g-_0..g-_{m-1}, u_1..u_n, v_1..v_n,
    #          s+_1..s+_{m-2}, s-_1..s-_{m-2}
    U = 2 * m
    V = 2 * m + n
    SP = 2 * m + 2 * n
    SM = SP + n_slope
    nc = SM + n_slope
    nrows = n + n_slope
    A = np.zeros((nrows, nc))
    b = np.zeros(nrows)
    rows = np.arange(n)
    A[rows, inverse] = 1.0
    A[rows, m + inverse] = -1.0
    A[rows, U + rows] = 1.0
    A[rows, V + rows] = -1.0
    b[:n] = w
    for i in range(n_slope):
        r = n + i
        cm1 = 1.0 / h[i]
        cp1 = 1.0 / h[i + 1]
        A[r, i] = cm1
        A[r, m + i] = -cm1
        A[r, i + 1] = -(cm1 + cp1)
        A[r, m + i + 1] = cm1 + cp1
        A[r, i + 2] = cp1
        A[r, m + i + 2] = -cp1
        A[r, SP + i] = -1.0
        A[r, SM + i] = 1.0
    c = np.zeros(nc)
    c[U:U + n] = tau
    c[V:V + n] = 1.0 - tau
    c[SP:] = lam

    basis = np.empty(nrows, dtype=np.int64)
    basis[:n] = np.where(w >= 0.0, U + rows, V + rows)
    basis[n:] = SM + np.arange(n_slope)

    sol = lp_solve(LinearProgram(c, A, b), basis=basis)
    values = sol.x[:m] - sol.x[m:2 * m]
    loss = float(np.sum(rho_tau(w - values[inverse], level)))
    slopes = np.diff(values) / h
    penalty = float(np.sum(np.abs(np.diff(slopes))))
    return PiecewiseLinearFit(
        knots=knots,
        values=values,
        penalty_weight=lam,
        objective=loss + lam * penalty,
        loss=loss,
        penalty=penalty,
    )
