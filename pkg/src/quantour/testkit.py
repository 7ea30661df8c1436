"""Shared generators and independent oracles for the test suite.

Everything here is a pure function of its parameters and a seed, and the
oracles never call the modules they are used to validate: the check-loss
line oracle enumerates candidate lines directly, the membership oracle
wraps the dense reference region, and the hull/clipping helpers are
self-contained textbook constructions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SizeLimitError
from .projquant import Dataset, QuantileLevel

__all__ = [
    "Scenario",
    "SCENARIOS",
    "generate",
    "gen_gaussian",
    "gen_uniform_disk",
    "gen_segment",
    "gen_ring",
    "checkloss_line_oracle",
    "membership_grid_oracle",
    "convex_hull",
    "clip_halfplanes",
    "cyclic_close",
]


@dataclass(frozen=True)
class Scenario:
    """Named reproducible dataset recipe: (name, seed) pins everything."""

    name: str
    shape: str          # gaussian | uniform-disk | segment | ring
    n: int
    seed: int
    param: float = 0.0  # segment orientation / ring eccentricity

    def dataset(self) -> Dataset:
        return generate(self)


def generate(scenario: Scenario) -> Dataset:
    if scenario.shape == "gaussian":
        return gen_gaussian(scenario.n, scenario.seed)
    if scenario.shape == "uniform-disk":
        return gen_uniform_disk(scenario.n, scenario.seed)
    if scenario.shape == "segment":
        angle = scenario.param if scenario.param else None
        return gen_segment(scenario.n, angle, scenario.seed)
    if scenario.shape == "ring":
        return gen_ring(scenario.n, scenario.seed, eccentricity=scenario.param)
    raise ValueError(f"unknown scenario shape {scenario.shape!r}")


def gen_gaussian(n, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    return Dataset(scale * rng.standard_normal((n, 2)))


def gen_uniform_disk(n, seed, radius=1.0):
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.uniform(size=n))
    a = rng.uniform(0.0, 2.0 * np.pi, size=n)
    return Dataset(np.column_stack([r * np.cos(a), r * np.sin(a)]))


def gen_segment(n, orientation_angle=None, seed=0):
    """n points equally spaced on a unit-length segment through the origin.

    With ``orientation_angle=None`` the orientation is drawn from the seed
    (the randomly oriented degenerate dataset); the points themselves are
    deterministic given the angle.
    """
    if n < 2:
        raise ValueError("segment needs n >= 2")
    if orientation_angle is None:
        orientation_angle = float(np.random.default_rng(seed).uniform(0.0, np.pi))
    t = np.linspace(-0.5, 0.5, n)
    e = np.array([np.cos(orientation_angle), np.sin(orientation_angle)])
    # exact zeros at cardinal orientations, so a "vertical" segment really
    # has all abscissas equal (the singular-design case)
    e[np.abs(e) < 1e-15] = 0.0
    return Dataset(t[:, None] * e)


def gen_ring(n, seed, radius=1.0, eccentricity=0.0, jitter=0.0):
    """Points spread along an ellipse boundary (dense smooth hull)."""
    rng = np.random.default_rng(seed)
    a = np.sort(rng.uniform(0.0, 2.0 * np.pi, size=n))
    rx, ry = radius, radius * (1.0 - eccentricity)
    pts = np.column_stack([rx * np.cos(a), ry * np.sin(a)])
    if jitter:
        pts += jitter * rng.uniform(-1.0, 1.0, size=pts.shape)
    return Dataset(pts)


# twenty seeded scenarios for the nesting/equivariance suites
SCENARIOS = tuple(
    [Scenario(f"gauss-{i}", "gaussian", 40 + 37 * i, 100 + i) for i in range(8)]
    + [Scenario(f"disk-{i}", "uniform-disk", 60 + 23 * i, 200 + i) for i in range(6)]
    + [Scenario(f"seg-{i}", "segment", 51 + 10 * i, 300 + i, param=0.3 + 0.5 * i)
       for i in range(3)]
    + [Scenario(f"ring-{i}", "ring", 80 + 40 * i, 400 + i, param=0.2 * i)
       for i in range(3)]
)


def _checkloss(residuals, tau):
    r = np.asarray(residuals, dtype=np.float64)
    return float(np.sum(r * (tau - (r < 0))))


def checkloss_line_oracle(pairs, level: QuantileLevel):
    """Exhaustive best line by check loss: all lines through data-point
    pairs plus the horizontal line through each point.

    Returns (intercept, slope, objective).  Guarded to n in [2, 60]; the
    enumeration is O(n^3) in the loss evaluations.
    """
    zy = np.atleast_2d(np.asarray(pairs, dtype=np.float64))
    n = zy.shape[0]
    if not 2 <= n <= 60:
        raise SizeLimitError(f"line oracle supports 2 <= n <= 60, got {n}")
    z, y = zy[:, 0], zy[:, 1]
    tau = level.tau
    best = None
    for i in range(n):
        for j in range(i + 1, n):
            if z[i] == z[j]:
                continue
            b = (y[j] - y[i]) / (z[j] - z[i])
            a = y[i] - b * z[i]
            obj = _checkloss(y - (a + b * z), tau)
            if best is None or obj < best[2]:
                best = (a, b, obj)
    for i in range(n):
        obj = _checkloss(y - y[i], tau)
        if best is None or obj < best[2]:
            best = (y[i], 0.0, obj)
    return best


def membership_grid_oracle(data: Dataset, level: QuantileLevel, resolution: int):
    """Boolean membership lattice of the dense reference region.

    Cell centers of a resolution x resolution partition of the bounding
    box; resolution 1 gives the single box center.  Guards: n <= 1000,
    resolution <= 200.
    """
    from .oracle import ReferenceRegion

    if len(data) > 1000:
        raise SizeLimitError("membership oracle supports n <= 1000")
    if not 1 <= resolution <= 200:
        raise SizeLimitError("resolution must be in [1, 200]")
    lo = data.points.min(axis=0)
    hi = data.points.max(axis=0)
    step = (hi - lo) / resolution
    centers_x = lo[0] + step[0] * (np.arange(resolution) + 0.5)
    centers_y = lo[1] + step[1] * (np.arange(resolution) + 0.5)
    gx, gy = np.meshgrid(centers_x, centers_y, indexing="ij")
    queries = np.column_stack([gx.ravel(), gy.ravel()])
    region = ReferenceRegion(data, level)
    return (region.margins(queries) >= 0.0).reshape(resolution, resolution)


def convex_hull(points):
    """Counterclockwise hull vertices, Andrew's monotone chain."""
    pts = np.unique(np.asarray(points, dtype=np.float64), axis=0)
    if pts.shape[0] <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def build(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and cross(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
    lower = build(pts)
    upper = build(pts[::-1])
    return np.asarray(lower[:-1] + upper[:-1])


def clip_halfplanes(thetas, offsets, box=1e6):
    """Naive halfplane intersection by successive polygon clipping.

    Independent O(K * V) oracle for the sorted-normal single-pass
    algorithm: starts from a huge square and clips by each halfplane
    u(theta) . x >= offset in turn.  Returns the vertex array (possibly
    empty); callers must pick ``box`` well above the expected region.
    """
    poly = [(-box, -box), (box, -box), (box, box), (-box, box)]
    for t, q in zip(np.asarray(thetas, float), np.asarray(offsets, float)):
        ux, uy = np.cos(t), np.sin(t)
        out = []
        k = len(poly)
        for i in range(k):
            a, b = poly[i], poly[(i + 1) % k]
            fa = ux * a[0] + uy * a[1] - q
            fb = ux * b[0] + uy * b[1] - q
            if fa >= 0:
                out.append(a)
            if (fa < 0) != (fb < 0):
                s = fa / (fa - fb)
                out.append((a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])))
        poly = out
        if len(poly) < 3:
            return np.empty((0, 2))
    return np.asarray(poly)


def cyclic_close(a, b, tol=1e-9):
    """Vertex lists equal as cyclic sequences within tolerance."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        return False
    if a.shape[0] == 0:
        return True
    for shift in range(a.shape[0]):
        if np.allclose(np.roll(b, shift, axis=0), a, rtol=0.0, atol=tol):
            return True
    return False
