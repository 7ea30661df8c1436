import math

import numpy as np
import pytest

from quantour.contour import contour, make_grid
from quantour.errors import SizeLimitError
from quantour.oracle import (
    DepthValue,
    ReferenceRegion,
    exact_depth,
    reference_region_membership,
)
from quantour.projquant import Dataset, QuantileLevel
from quantour.testkit import gen_gaussian, gen_segment, membership_grid_oracle


def brute_force_depth(points, query):
    """Independent oracle: evaluate the halfplane count at the midpoint of
    every arc between consecutive critical angles (O(n^2))."""
    d = points - np.asarray(query, dtype=float)
    nz = (d[:, 0] != 0) | (d[:, 1] != 0)
    coincident = len(d) - int(nz.sum())
    d = d[nz]
    if len(d) == 0:
        return coincident
    alpha = np.arctan2(d[:, 1], d[:, 0])
    crit = np.sort(np.unique(np.concatenate([
        np.mod(alpha - np.pi / 2, 2 * np.pi),
        np.mod(alpha + np.pi / 2, 2 * np.pi)])))
    mids = (crit + np.diff(crit, append=crit[0] + 2 * np.pi) / 2)
    u = np.column_stack([np.cos(mids), np.sin(mids)])
    counts = (u @ d.T >= 0).sum(axis=1)
    return int(counts.min()) + coincident


def test_depth_value_bounds():
    with pytest.raises(ValueError):
        DepthValue(5, 3)


def test_exact_depth_examples():
    tri = Dataset([[0.0, 0.0], [1.0, 0.0], [0.3, 1.0]])
    assert exact_depth(tri, (0.0, 0.0)).depth == 1
    diamond = Dataset([[1, 0], [-1, 0], [0, 1], [0, -1]])
    assert exact_depth(diamond, (0.0, 0.0)).depth == 2
    assert exact_depth(diamond, (50.0, 3.0)).depth == 0


def test_exact_depth_matches_brute_force():
    rng = np.random.default_rng(0)
    for trial in range(40):
        n = int(rng.integers(3, 60))
        pts = rng.standard_normal((n, 2))
        data = Dataset(pts)
        if trial % 3 == 0:
            q = pts[int(rng.integers(0, n))]  # query on a data point
        else:
            q = rng.standard_normal(2)
        assert exact_depth(data, q).depth == brute_force_depth(pts, q)


def test_exact_depth_translation_rotation_invariance():
    rng = np.random.default_rng(1)
    pts = rng.standard_normal((40, 2))
    q = rng.standard_normal(2)
    base = exact_depth(Dataset(pts), q).depth
    c = np.array([10.0, -4.0])
    assert exact_depth(Dataset(pts + c), q + c).depth == base
    ang = 0.7
    R = np.array([[math.cos(ang), -math.sin(ang)], [math.sin(ang), math.cos(ang)]])
    assert exact_depth(Dataset(pts @ R.T), R @ q).depth == base


def test_exact_depth_size_guard():
    pts = np.zeros((10_001, 2))
    pts[:, 0] = np.arange(10_001)
    with pytest.raises(SizeLimitError):
        exact_depth(Dataset(pts), (0.0, 0.0))


# -------------------------------------------------------- reference region

def test_reference_membership_examples():
    data = gen_gaussian(400, 7)
    lvl = QuantileLevel(0.1)
    region = ReferenceRegion(data, lvl, base_directions=20_000)
    assert region.contains(data.points.mean(axis=0))       # deep point
    assert not region.contains((50.0, 50.0))               # far outside hull
    # single-shot wrapper agrees
    assert reference_region_membership(Dataset(data.points[:50]), lvl,
                                       data.points[:50].mean(axis=0))


def test_reference_membership_collinear_chop():
    data = gen_segment(101, 0.9, seed=0)
    e = data.points[-1] - data.points[0]
    e = e / np.hypot(*e)
    lvl = QuantileLevel(0.1)
    region = ReferenceRegion(data, lvl, base_directions=20_000)
    mid = 0.5 * (data.points[0] + data.points[-1])
    assert region.contains(mid)
    # 5% along the segment was chopped off (outside the middle 80%)
    p05 = data.points[0] + 0.05 * (data.points[-1] - data.points[0])
    assert not region.contains(p05)
    # 15% along is inside
    p15 = data.points[0] + 0.15 * (data.points[-1] - data.points[0])
    assert region.contains(p15)


def test_reference_region_size_guard():
    with pytest.raises(SizeLimitError):
        ReferenceRegion(Dataset(np.random.default_rng(0).standard_normal((1001, 2))),
                        QuantileLevel(0.1))


def test_contour_contains_reference_region():
    # the grid directions are a subset of the reference directions, so the
    # contour (fewer constraints) contains the reference region
    data = gen_gaussian(80, 3)
    lvl = QuantileLevel(0.15)
    region = ReferenceRegion(data, lvl, base_directions=20_000)
    grid = make_grid(16)  # 16 | 20000
    r = contour(data, lvl, grid)
    rng = np.random.default_rng(4)
    pts = rng.uniform(data.points.min(), data.points.max(), size=(400, 2))
    member = region.margins(pts) >= 0
    for p, inside in zip(pts, member):
        if inside:
            assert r.margins(p[None, :])[0] >= -1e-9


def test_membership_grid_oracle_shapes():
    data = gen_gaussian(60, 11)
    grid = membership_grid_oracle(data, QuantileLevel(0.2), 9)
    assert grid.shape == (9, 9) and grid.dtype == bool
    assert membership_grid_oracle(data, QuantileLevel(0.2), 1).shape == (1, 1)
    # empty region at extreme tau: all false
    assert not membership_grid_oracle(data, QuantileLevel(0.95), 5).any()
