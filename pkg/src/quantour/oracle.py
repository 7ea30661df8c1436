"""Exact small-sample references used to validate the contour module.

``exact_depth`` computes the classical halfspace (Tukey) depth of a query
point by an O(n log n) rotating scan.  ``ReferenceRegion`` realizes the
projection-quantile region on a very dense direction set: 100,000
equispaced directions augmented with every direction orthogonal to a
pairwise difference of data points, which are exactly the critical angles
where the projection ordering (and hence the quantile point) can change.
Between consecutive critical angles the quantile is delivered by a fixed
data point, so adding them pins the region to within a sliver of the full
continuum intersection.

Both are deliberately slow and guarded by hard size limits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import SizeLimitError
from .projquant import Dataset, QuantileLevel, order_index

__all__ = [
    "DepthValue",
    "exact_depth",
    "ReferenceRegion",
    "reference_region_membership",
]

DEPTH_MAX_N = 10_000
REFERENCE_MAX_N = 1_000
REFERENCE_GRID = 100_000


@dataclass(frozen=True)
class DepthValue:
    """Halfspace depth as an integer count in [0, n]."""

    depth: int
    n: int

    def __post_init__(self):
        if not 0 <= self.depth <= self.n:
            raise ValueError("depth must lie in [0, n]")

    def fraction(self):
        return self.depth / self.n


def exact_depth(data: Dataset, point) -> DepthValue:
    """Minimum, over closed halfplanes with ``point`` on the boundary, of
    the number of data points in the halfplane.

    Rotating scan: the count as a function of the halfplane normal angle
    phi is the number of data-point angles within quarter-turn of phi; it
    only changes at event angles alpha_i +- pi/2, so the minimum over the
    open arcs between sorted events is the global minimum (event angles
    themselves have counts at least as large, the intervals being closed).
    """
    n = len(data)
    if n > DEPTH_MAX_N:
        raise SizeLimitError(f"exact_depth supports n <= {DEPTH_MAX_N}")
    p = np.asarray(point, dtype=np.float64)
    if not np.isfinite(p).all():
        raise ValueError("query point must be finite")
    diff = data.points - p
    nonzero = (diff[:, 0] != 0.0) | (diff[:, 1] != 0.0)
    coincident = int(n - np.count_nonzero(nonzero))
    d = diff[nonzero]
    if d.shape[0] == 0:
        return DepthValue(coincident, n)

    alpha = np.arctan2(d[:, 1], d[:, 0])
    starts = np.mod(alpha - 0.5 * math.pi, 2.0 * math.pi)
    ends = np.mod(alpha + 0.5 * math.pi, 2.0 * math.pi)
    events = np.concatenate([starts, ends])
    deltas = np.concatenate([np.ones_like(starts, dtype=np.int64),
                             -np.ones_like(ends, dtype=np.int64)])
    order = np.argsort(events, kind="stable")
    events = events[order]
    deltas = deltas[order]
    m = events.shape[0]

    # start in the middle of the widest empty arc (at least 2*pi/m wide),
    # count coverage there directly, then walk the events once around
    gaps = np.diff(events, append=events[0] + 2.0 * math.pi)
    g = int(np.argmax(gaps))
    phi0 = events[g] + 0.5 * gaps[g]
    cov = int(np.count_nonzero(np.cos(phi0 - alpha) >= 0.0))
    best = cov
    i = (g + 1) % m
    seen = 0
    while seen < m:
        j = i
        delta = 0
        while seen < m and events[j] == events[i]:
            delta += int(deltas[j])
            j = (j + 1) % m
            seen += 1
            if j == i:
                break
        cov += delta
        best = min(best, cov)
        i = j
    return DepthValue(best + coincident, n)


class ReferenceRegion:
    """Dense-direction projection-quantile region for membership queries."""

    def __init__(self, data: Dataset, level: QuantileLevel,
                 base_directions: int = REFERENCE_GRID):
        n = len(data)
        if n > REFERENCE_MAX_N:
            raise SizeLimitError(f"reference region supports n <= {REFERENCE_MAX_N}")
        pts = data.points
        base = 2.0 * math.pi * np.arange(base_directions) / base_directions
        if n >= 2:
            ii, jj = np.triu_indices(n, k=1)
            d = pts[ii] - pts[jj]
            keep = (d[:, 0] != 0.0) | (d[:, 1] != 0.0)
            ang = np.arctan2(d[keep, 1], d[keep, 0])
            crit = np.mod(np.concatenate([ang + 0.5 * math.pi,
                                          ang - 0.5 * math.pi]), 2.0 * math.pi)
            thetas = np.concatenate([base, crit])
        else:
            thetas = base
        thetas = np.unique(thetas)
        self.thetas = thetas
        self.level = level
        k = order_index(n, level.tau)
        self.offsets = _kernels.directional_offsets(
            np.ascontiguousarray(pts), thetas, k)

    def margins(self, points) -> np.ndarray:
        """min over reference directions of (u . x - q_tau(u)) per point.

        Nonnegative means inside; for interior points this equals the
        distance to the region boundary, for exterior points the magnitude
        is the largest single-halfplane violation (a lower bound on the
        distance, tight here because the normals are dense).
        """
        pts = np.ascontiguousarray(np.atleast_2d(points), dtype=np.float64)
        return _kernels.min_margins(pts, self.thetas, self.offsets)

    def contains(self, point) -> bool:
        return bool(self.margins(np.atleast_2d(point))[0] >= 0.0)


def reference_region_membership(data: Dataset, level: QuantileLevel,
                                point) -> bool:
    """True iff u . point >= q_tau(u) for every reference direction.

    Convenience wrapper that builds the dense region per call; batch
    queries should construct :class:`ReferenceRegion` once and reuse it.
    """
    return ReferenceRegion(data, level).contains(point)
