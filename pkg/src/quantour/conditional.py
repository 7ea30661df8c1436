"""Covariate-indexed contours (growth charts).

For every grid direction u the bivariate response collapses to the
univariate projection w_k = u . p_k, which is fitted against the
covariate by TV-penalized quantile regression; the fitted value at the
query covariate becomes the halfplane offset for that direction, and the
offsets are intersected exactly as in the static case.  One smoothing
weight is shared across all directions.

Quantile crossing (per-direction fitted offsets out of order across
levels) is reported on the chart result, never repaired; non-crossing
estimators are out of scope here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .contour import ContourRegion, DirectionGrid, _intersect_sorted
from .errors import InvalidParameterError, MissingCovariateError
from .projquant import Dataset, QuantileLevel
from .qreg import qr_tv
from . import contour as _contour_mod

__all__ = [
    "ConditionalContourRequest",
    "conditional_contour",
    "growth_chart",
    "GrowthChart",
    "ChartEntry",
    "CrossingViolation",
]

DEGENERATE_COVARIATE = "degenerate-covariate"
EXTRAPOLATED = "extrapolated"


@dataclass(frozen=True)
class ConditionalContourRequest:
    """Parameters of one conditional contour evaluation."""

    level: QuantileLevel
    grid: DirectionGrid
    penalty_weight: float
    query_x: float

    def __post_init__(self):
        lam = float(self.penalty_weight)
        if not np.isfinite(lam) or lam < 0.0:
            raise InvalidParameterError("penalty weight must be >= 0")
        object.__setattr__(self, "penalty_weight", lam)
        object.__setattr__(self, "query_x", float(self.query_x))


def _direction_fits(data, grid, level, lam):
    pts = data.points
    x = data.covariate
    thetas = grid.thetas
    fits = []
    for t in thetas:
        w = pts[:, 0] * np.cos(t) + pts[:, 1] * np.sin(t)
        fits.append(qr_tv(np.column_stack([x, w]), level, lam))
    return fits


def conditional_contour(data: Dataset, request: ConditionalContourRequest) -> ContourRegion:
    """Contour of the conditional projection quantiles at one covariate value.

    A covariate with a single distinct value carries no information: the
    result falls back to the static contour, flagged 'degenerate-covariate'.
    A query outside the covariate range uses end-slope extrapolation and is
    flagged 'extrapolated'.
    """
    if not data.has_covariate:
        raise MissingCovariateError("dataset has no covariate column")
    x = data.covariate
    if np.ptp(x) == 0.0:
        region = _contour_mod.contour(data, request.level, request.grid)
        return region.with_flags(DEGENERATE_COVARIATE)
    fits = _direction_fits(data, request.grid, request.level,
                           request.penalty_weight)
    offsets = np.array([f.evaluate(request.query_x) for f in fits])
    region = _intersect_sorted(request.grid.thetas, offsets,
                               np.arange(request.grid.count, dtype=np.intp))
    if request.query_x < x.min() or request.query_x > x.max():
        region = region.with_flags(EXTRAPOLATED)
    return region


@dataclass(frozen=True)
class ChartEntry:
    query_x: float
    level: QuantileLevel
    region: ContourRegion
    extrapolated: bool


@dataclass(frozen=True)
class CrossingViolation:
    """Fitted offsets decreased in tau for one (direction, query) cell."""

    direction_index: int
    query_x: float
    lower_tau: float
    upper_tau: float
    gap: float


@dataclass(frozen=True)
class GrowthChart:
    entries: tuple
    crossings: tuple = field(default=())

    def region(self, query_x, tau):
        for e in self.entries:
            if e.query_x == query_x and e.level.tau == tau:
                return e.region
        raise KeyError((query_x, tau))


def growth_chart(data: Dataset, levels, grid: DirectionGrid,
                 penalty_weight: float, x_grid) -> GrowthChart:
    """Batch of conditional contours over a covariate grid and tau levels.

    Each (direction, tau) curve is fitted once and evaluated at every
    query value.  Per-direction offset monotonicity across the sorted
    levels is checked at each query; violations are collected on the
    returned chart (quantile crossing is reported, not repaired).
    """
    if not data.has_covariate:
        raise MissingCovariateError("dataset has no covariate column")
    levels = [lv if isinstance(lv, QuantileLevel) else QuantileLevel(lv)
              for lv in levels]
    x_grid = np.atleast_1d(np.asarray(x_grid, dtype=np.float64))
    lam = float(penalty_weight)
    x = data.covariate
    degenerate = np.ptp(x) == 0.0
    xmin, xmax = float(x.min()), float(x.max())

    entries = []
    crossings = []
    if degenerate:
        for lv in levels:
            region = _contour_mod.contour(data, lv, grid).with_flags(DEGENERATE_COVARIATE)
            for qx in x_grid:
                entries.append(ChartEntry(float(qx), lv, region, False))
        return GrowthChart(tuple(entries), ())

    # offsets[level][direction, query]
    all_offsets = []
    for lv in levels:
        fits = _direction_fits(data, grid, lv, lam)
        all_offsets.append(np.array([f.evaluate(x_grid) for f in fits]))

    order = np.argsort([lv.tau for lv in levels])
    for a, b in zip(order[:-1], order[1:]):
        lo, hi = levels[a], levels[b]
        diff = all_offsets[b] - all_offsets[a]
        for j, qi in zip(*np.nonzero(diff < -1e-9)):
            crossings.append(CrossingViolation(
                direction_index=int(j),
                query_x=float(x_grid[qi]),
                lower_tau=lo.tau,
                upper_tau=hi.tau,
                gap=float(diff[j, qi]),
            ))

    src = np.arange(grid.count, dtype=np.intp)
    for lv, offsets in zip(levels, all_offsets):
        for qi, qx in enumerate(x_grid):
            region = _intersect_sorted(grid.thetas, offsets[:, qi], src)
            extrapolated = bool(qx < xmin or qx > xmax)
            if extrapolated:
                region = region.with_flags(EXTRAPOLATED)
            entries.append(ChartEntry(float(qx), lv, region, extrapolated))
    return GrowthChart(tuple(entries), tuple(crossings))
