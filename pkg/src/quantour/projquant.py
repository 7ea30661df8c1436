"""Projection quantiles.

A direction u on the unit circle turns a bivariate cloud into the
univariate sample of projections u . p_i.  The left ("inf") sample
quantile of that projection,

    q_tau(u) = inf{ t : #{ w_i <= t } / n >= tau },

equals the ceil(n*tau)-th order statistic and defines the halfplane
{ x : u . x >= q_tau(u) } whose boundary line marks the quantile in the
rotated frame.  Intersecting these halfplanes over a direction grid is
what the :mod:`quantour.contour` module does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InvalidParameterError

__all__ = [
    "QuantileLevel",
    "Direction",
    "Dataset",
    "ProjectedSample",
    "Halfplane",
    "order_index",
    "project",
    "inf_quantile",
    "directional_quantile",
    "directional_offsets",
]

TWO_PI = 2.0 * math.pi


def _readonly(arr):
    arr = np.array(arr, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class QuantileLevel:
    """Quantile level tau in (0, 1]; tau = 1 picks the maximum."""

    tau: float

    def __post_init__(self):
        tau = float(self.tau)
        if not math.isfinite(tau) or not 0.0 < tau <= 1.0:
            raise InvalidParameterError(f"tau must be in (0, 1], got {self.tau!r}")
        object.__setattr__(self, "tau", tau)


@dataclass(frozen=True)
class Direction:
    """Unit direction on the circle, stored as an angle in [0, 2*pi)."""

    theta: float

    def __post_init__(self):
        theta = float(self.theta)
        if not math.isfinite(theta):
            raise InvalidParameterError("theta must be finite")
        object.__setattr__(self, "theta", theta % TWO_PI)

    @classmethod
    def from_vector(cls, x, y):
        """Direction of the (nonzero) vector (x, y)."""
        if x == 0.0 and y == 0.0:
            raise InvalidParameterError("zero vector has no direction")
        return cls(math.atan2(y, x))

    @property
    def vector(self):
        # snap ulp-level residue at cardinal angles so e.g. theta=pi/2
        # projects exactly onto the second coordinate
        ux, uy = math.cos(self.theta), math.sin(self.theta)
        if abs(ux) < 1e-15:
            ux = 0.0
        if abs(uy) < 1e-15:
            uy = 0.0
        return np.array([ux, uy])

    def antipode(self):
        return Direction(self.theta + math.pi)


@dataclass(frozen=True)
class Dataset:
    """Bivariate sample, optionally with a per-point covariate.

    ``points`` is coerced to a read-only (n, 2) float array; the optional
    ``covariate`` to a read-only length-n array.  All values must be
    finite and n >= 1.
    """

    points: np.ndarray
    covariate: np.ndarray | None = None

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=np.float64))
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
            raise InvalidParameterError("points must be a nonempty (n, 2) array")
        if not np.isfinite(pts).all():
            raise InvalidParameterError("points must be finite")
        object.__setattr__(self, "points", _readonly(pts))
        if self.covariate is not None:
            cov = np.asarray(self.covariate, dtype=np.float64).ravel()
            if cov.shape[0] != pts.shape[0]:
                raise InvalidParameterError("covariate length must match points")
            if not np.isfinite(cov).all():
                raise InvalidParameterError("covariate must be finite")
            object.__setattr__(self, "covariate", _readonly(cov))

    def __len__(self):
        return self.points.shape[0]

    @property
    def has_covariate(self):
        return self.covariate is not None

    def translated(self, c):
        c = np.asarray(c, dtype=np.float64)
        return Dataset(self.points + c, self.covariate)

    def scaled(self, s):
        return Dataset(self.points * float(s), self.covariate)

    def bounding_box_diagonal(self):
        spread = self.points.max(axis=0) - self.points.min(axis=0)
        return float(np.hypot(spread[0], spread[1]))

    def diameter(self):
        """Exact diameter of the sample (max pairwise distance, via the hull)."""
        pts = self.points
        if len(pts) > 3:
            hull = _hull_vertices(pts)
            if hull.shape[0] >= 2:
                pts = hull
        d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
        return float(np.sqrt(d2.max()))


def _hull_vertices(pts):
    # Andrew's monotone chain; duplicated intentionally small here to keep
    # Dataset self-contained (testkit has its own oracle copy).
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    p = pts[order]
    if p.shape[0] < 3:
        return p

    def half(points):
        out = []
        for q in points:
            while len(out) >= 2:
                cross = (out[-1][0] - out[-2][0]) * (q[1] - out[-2][1]) - \
                        (out[-1][1] - out[-2][1]) * (q[0] - out[-2][0])
                if cross <= 0:
                    out.pop()
                else:
                    break
            out.append(q)
        return out

    lower = half(p)
    upper = half(p[::-1])
    return np.array(lower[:-1] + upper[:-1])


@dataclass(frozen=True)
class ProjectedSample:
    """Univariate sample of projections w_i = u . p_i."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64).ravel()
        if vals.shape[0] < 1:
            raise InvalidParameterError("projected sample must be nonempty")
        if not np.isfinite(vals).all():
            raise InvalidParameterError("projections must be finite")
        object.__setattr__(self, "values", _readonly(vals))

    def __len__(self):
        return self.values.shape[0]


@dataclass(frozen=True)
class Halfplane:
    """Closed halfplane { x : u . x >= offset } with unit normal u."""

    normal: Direction
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "offset", float(self.offset))

    def contains(self, point, tol=1e-9):
        p = np.asarray(point, dtype=np.float64)
        return float(self.normal.vector @ p) >= self.offset - tol


def order_index(n: int, tau: float) -> int:
    """1-based order-statistic index ceil(n*tau), guarded against float fuzz.

    n*tau that lands within 1e-9 of an integer is snapped to it, so e.g.
    tau=0.7, n=10 gives 7 even though 10*0.7 = 6.999999999999999.
    """
    m = n * tau
    r = round(m)
    k = r if abs(m - r) <= 1e-9 else math.ceil(m)
    return int(min(max(k, 1), n))


def project(data: Dataset, direction: Direction) -> ProjectedSample:
    """Project every data point onto the direction (O(n))."""
    return ProjectedSample(data.points @ direction.vector)


def inf_quantile(sample: ProjectedSample, level: QuantileLevel) -> float:
    """Left sample quantile inf{t : F_n(t) >= tau}.

    Always an element of the sample: the ceil(n*tau)-th smallest value.
    """
    vals = sample.values
    k = order_index(len(vals), level.tau)
    return float(np.partition(vals, k - 1)[k - 1])


def directional_quantile(data: Dataset, direction: Direction,
                         level: QuantileLevel) -> Halfplane:
    """Halfplane whose boundary is the quantile line of the projection."""
    return Halfplane(direction, inf_quantile(project(data, direction), level))


def directional_offsets(data: Dataset, thetas, level: QuantileLevel,
                        num_threads: int = 0) -> np.ndarray:
    """Batch form of :func:`directional_quantile`: offsets for many angles.

    This is the O(nK) hot path; it runs on the active kernel backend and
    returns ``offsets[j] = inf_quantile(project(data, theta_j), tau)``.
    """
    thetas = np.ascontiguousarray(thetas, dtype=np.float64)
    k = order_index(len(data), level.tau)
    return _kernels.directional_offsets(data.points, thetas, k, num_threads)
