"""Contour construction: intersecting directional quantile halfplanes.

A grid of K equispaced directions yields K halfplanes u_j . x >= q_j.
Because the normals arrive sorted by angle, their intersection is built in
a single O(K) pass with a double-ended list of active constraints (the
dual of a sorted-point convex hull scan), so the whole contour costs
O(nK) for the projections plus O(K) assembly.

The intersection of finitely many closed halfplanes whose normals span
all directions is a (possibly empty) convex polygon; emptiness is a valid
result here, never an exception.  Construction is fully deterministic:
no randomness, no schedule dependence.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContractViolationError,
    InvalidGridError,
    UndefinedDistanceError,
)
from .projquant import (
    TWO_PI,
    Dataset,
    Direction,
    Halfplane,
    QuantileLevel,
    directional_offsets,
)

__all__ = [
    "DirectionGrid",
    "ContourRegion",
    "make_grid",
    "intersect_halfplanes",
    "contour",
    "contains",
    "hausdorff",
]

# normals closer than this (radians) are the same constraint; keep the tighter
ANGLE_MERGE_TOL = 1e-12
# below this sine, adjacent intersections are too ill-conditioned to trust
SIN_DROP_TOL = 1e-10


def _readonly(arr):
    arr = np.array(arr, dtype=np.float64, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DirectionGrid:
    """K equispaced directions theta_j = 2*pi*j/K, phase fixed at zero."""

    count: int
    thetas: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "thetas", _readonly(self.thetas))

    def direction(self, j):
        return Direction(self.thetas[j])

    def __len__(self):
        return self.count


def make_grid(K: int) -> DirectionGrid:
    """Equispaced direction grid; K >= 3 so the normals span the plane."""
    K = int(K)
    if K < 3:
        raise InvalidGridError(f"grid needs at least 3 directions, got {K}")
    return DirectionGrid(K, TWO_PI * np.arange(K) / K)


@dataclass(frozen=True)
class ContourRegion:
    """Convex polygon from a halfplane intersection, or the Empty region.

    ``vertices`` are counterclockwise; edge i lies on the boundary line of
    the input halfplane ``sources[i]`` (index into the caller's sequence),
    and vertex i is generated by edges i and i+1 (cyclically).  ``normals``
    and ``offsets`` hold the active constraints in edge order.
    """

    vertices: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray
    sources: np.ndarray
    flags: tuple = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", _readonly(self.vertices).reshape(-1, 2))
        object.__setattr__(self, "normals", _readonly(self.normals).reshape(-1, 2))
        object.__setattr__(self, "offsets", _readonly(self.offsets).ravel())
        src = np.array(self.sources, dtype=np.intp, copy=True).ravel()
        src.setflags(write=False)
        object.__setattr__(self, "sources", src)

    @classmethod
    def empty(cls, flags=()):
        z = np.empty((0, 2))
        return cls(z, z, np.empty(0), np.empty(0, dtype=np.intp), flags)

    @property
    def is_empty(self):
        return self.vertices.shape[0] == 0

    def __len__(self):
        return self.vertices.shape[0]

    @property
    def generating_pairs(self):
        """For each vertex, the (source i, source j) of its two active planes."""
        if self.is_empty:
            return np.empty((0, 2), dtype=np.intp)
        return np.column_stack([self.sources, np.roll(self.sources, -1)])

    def margins(self, points):
        """Signed slack of points against every active constraint (min over edges)."""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        if self.is_empty:
            return np.full(pts.shape[0], -np.inf)
        return (pts @ self.normals.T - self.offsets).min(axis=1)

    def area(self):
        if self.is_empty:
            return 0.0
        v = self.vertices
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def with_flags(self, *flags):
        return ContourRegion(self.vertices, self.normals, self.offsets,
                             self.sources, self.flags + tuple(flags))


def _intersect_sorted(thetas, offsets, sources):
    """Core pass over halfplanes u(theta) . x >= offset, angles presorted.

    Assumes strictly increasing angles in [0, 2*pi) (near-duplicates
    already merged).  Returns a ContourRegion (possibly empty); raises
    ContractViolationError when the normals leave a half-circle gap, since
    the intersection is then unbounded and not representable.
    """
    th = np.asarray(thetas, dtype=np.float64)
    q = np.asarray(offsets, dtype=np.float64)
    src = np.asarray(sources, dtype=np.intp)
    m = th.shape[0]
    scale = max(1.0, float(np.abs(q).max(initial=0.0)))

    # antipodal contradictions: u.x >= q1 and -u.x >= q2 with q1 + q2 > 0
    j = np.searchsorted(th, th + math.pi - ANGLE_MERGE_TOL)
    for i in range(m):
        jj = j[i]
        if jj < m and th[jj] - (th[i] + math.pi) < ANGLE_MERGE_TOL:
            if q[i] + q[jj] > 1e-12 * scale:
                return ContourRegion.empty()

    gaps = np.diff(th, append=th[0] + TWO_PI)
    if gaps.max() > math.pi - 1e-12:
        raise ContractViolationError(
            "halfplane normals leave a gap of at least pi; intersection is unbounded")

    ux = np.cos(th)
    uy = np.sin(th)

    def inter(a, b):
        cross = ux[a] * uy[b] - uy[a] * ux[b]
        return ((q[a] * uy[b] - q[b] * uy[a]) / cross,
                (ux[a] * q[b] - ux[b] * q[a]) / cross)

    def outside(h, p):
        return ux[h] * p[0] + uy[h] * p[1] < q[h]

    dq = deque()
    for h in range(m):
        while len(dq) >= 2 and outside(h, inter(dq[-2], dq[-1])):
            dq.pop()
        while len(dq) >= 2 and outside(h, inter(dq[0], dq[1])):
            dq.popleft()
        if dq:
            dth = th[h] - th[dq[-1]]
            if dth < 0.5 * math.pi and math.sin(dth) < SIN_DROP_TOL:
                # nearly identical normals: keep the tighter constraint
                if q[h] <= q[dq[-1]]:
                    continue
                dq.pop()
                while len(dq) >= 2 and outside(h, inter(dq[-2], dq[-1])):
                    dq.pop()
                while len(dq) >= 2 and outside(h, inter(dq[0], dq[1])):
                    dq.popleft()
        dq.append(h)

    while len(dq) >= 3 and outside(dq[0], inter(dq[-2], dq[-1])):
        dq.pop()
    while len(dq) >= 3 and outside(dq[-1], inter(dq[0], dq[1])):
        dq.popleft()
    if len(dq) < 3:
        return ContourRegion.empty()

    active = list(dq)

    # vertices between cyclically adjacent active planes; collapse edges of
    # zero length (pencils of lines through one point leave many of them)
    while True:
        k = len(active)
        if k < 3:
            return ContourRegion.empty()
        verts = np.array([inter(active[i], active[(i + 1) % k]) for i in range(k)])
        if not np.isfinite(verts).all():
            return ContourRegion.empty()
        vscale = max(scale, float(np.abs(verts).max()))
        edge_len = np.hypot(*(verts - np.roll(verts, 1, axis=0)).T)
        drop = np.flatnonzero(edge_len <= 1e-12 * vscale)
        if drop.size == 0:
            break
        del active[int(drop[0])]

    # a valid result is convex, positively oriented and feasible for every
    # input constraint; anything else means the true intersection is empty
    tol = 1e-9 * vscale
    margins = verts @ np.column_stack([ux, uy]).T - q
    if margins.min() < -tol:
        return ContourRegion.empty()
    x, y = verts[:, 0], verts[:, 1]
    if 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y) <= 0.0:
        return ContourRegion.empty()

    active = np.asarray(active, dtype=np.intp)
    return ContourRegion(
        vertices=verts,
        normals=np.column_stack([ux[active], uy[active]]),
        offsets=q[active],
        sources=src[active],
    )


def intersect_halfplanes(planes) -> ContourRegion:
    """Intersection of halfplanes presorted by normal angle.

    Input must be sorted strictly increasing in angle over [0, 2*pi);
    duplicated angles (within 1e-12) are merged keeping the larger offset.
    Unsorted input raises ContractViolationError.
    """
    planes = list(planes)
    if not planes:
        raise ContractViolationError("no halfplanes given")
    th = np.array([p.normal.theta for p in planes])
    q = np.array([p.offset for p in planes], dtype=np.float64)
    if np.any(np.diff(th) < 0.0):
        raise ContractViolationError("halfplanes must be sorted by normal angle")
    src = np.arange(len(planes), dtype=np.intp)
    th, q, src = _merge_duplicates(th, q, src)
    return _intersect_sorted(th, q, src)


def _merge_duplicates(th, q, src):
    if th.shape[0] < 2:
        return th, q, src
    keep_th, keep_q, keep_src = [th[0]], [q[0]], [src[0]]
    for i in range(1, th.shape[0]):
        if th[i] - keep_th[-1] < ANGLE_MERGE_TOL:
            if q[i] > keep_q[-1]:
                keep_q[-1] = q[i]
                keep_src[-1] = src[i]
        else:
            keep_th.append(th[i])
            keep_q.append(q[i])
            keep_src.append(src[i])
    return (np.asarray(keep_th), np.asarray(keep_q),
            np.asarray(keep_src, dtype=np.intp))


def contour(data: Dataset, level: QuantileLevel, grid: DirectionGrid,
            num_threads: int = 0) -> ContourRegion:
    """Approximate depth contour: intersect the K directional quantile
    halfplanes of the grid.  O(nK) work plus O(K) assembly."""
    offsets = directional_offsets(data, grid.thetas, level, num_threads)
    return _intersect_sorted(grid.thetas, offsets,
                             np.arange(grid.count, dtype=np.intp))


def contour_halfplanes(data: Dataset, level: QuantileLevel,
                       grid: DirectionGrid) -> list[Halfplane]:
    """The K directional quantile halfplanes themselves (for plotting)."""
    offsets = directional_offsets(data, grid.thetas, level)
    return [Halfplane(Direction(t), o) for t, o in zip(grid.thetas, offsets)]


def contains(region: ContourRegion, point, tol: float = 1e-9) -> bool:
    """Point lies in the region (within tol against every active plane)."""
    if region.is_empty:
        return False
    p = np.asarray(point, dtype=np.float64)
    return bool((region.normals @ p - region.offsets).min() >= -tol)


def _point_segment_dist(p, a, b):
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.hypot(*(p - a)))
    t = float((p - a) @ ab) / denom
    t = min(1.0, max(0.0, t))
    return float(np.hypot(*(p - (a + t * ab))))


def _directed_hausdorff(a: ContourRegion, b: ContourRegion):
    # max over a's region of the distance to b is attained at a vertex of a
    bverts = b.vertices
    bnext = np.roll(bverts, -1, axis=0)
    worst = 0.0
    for v in a.vertices:
        if (b.normals @ v - b.offsets).min() >= 0.0:
            continue
        d = min(_point_segment_dist(v, bverts[i], bnext[i])
                for i in range(bverts.shape[0]))
        worst = max(worst, d)
    return worst


def hausdorff(a: ContourRegion, b: ContourRegion) -> float:
    """Exact symmetric Hausdorff distance between two convex polygons."""
    if a.is_empty or b.is_empty:
        raise UndefinedDistanceError("Hausdorff distance needs nonempty regions")
    return max(_directed_hausdorff(a, b), _directed_hausdorff(b, a))
