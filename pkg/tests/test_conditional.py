import numpy as np
import pytest

from quantour.conditional import (
    DEGENERATE_COVARIATE,
    ConditionalContourRequest,
    conditional_contour,
    growth_chart,
)
from quantour.contour import contour, hausdorff, make_grid
from quantour.errors import MissingCovariateError
from quantour.projquant import Dataset, QuantileLevel


def make_request(tau=0.1, K=24, lam=1.0, x=0.0):
    return ConditionalContourRequest(QuantileLevel(tau), make_grid(K), lam, x)


def cloud_with_covariate(n, seed, trend=0.0):
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 10.0, n)
    pts = rng.standard_normal((n, 2))
    pts[:, 0] += trend * x
    return Dataset(pts, x)


def test_missing_covariate():
    data = Dataset(np.random.default_rng(0).standard_normal((20, 2)))
    with pytest.raises(MissingCovariateError):
        conditional_contour(data, make_request())


def test_constant_covariate_reduces_to_static():
    rng = np.random.default_rng(1)
    pts = rng.standard_normal((60, 2))
    data = Dataset(pts, np.full(60, 2.0))
    req = make_request(tau=0.15, K=32, lam=3.0, x=2.0)
    cond = conditional_contour(data, req)
    stat = contour(Dataset(pts), QuantileLevel(0.15), make_grid(32))
    assert DEGENERATE_COVARIATE in cond.flags
    assert np.allclose(cond.vertices, stat.vertices, atol=1e-9)


def test_x_independent_large_lambda_close_to_static():
    data = cloud_with_covariate(250, 2)
    lam = 1e6 * max(1.0, np.ptp(data.points))
    req = make_request(tau=0.1, K=24, lam=lam, x=5.0)
    cond = conditional_contour(data, req)
    stat = contour(Dataset(data.points), QuantileLevel(0.1), make_grid(24))
    diam = data.diameter()
    assert hausdorff(cond, stat) <= 0.05 * diam


def test_extrapolation_flag():
    data = cloud_with_covariate(80, 3)
    region = conditional_contour(data, make_request(x=25.0, K=16, lam=10.0))
    assert "extrapolated" in region.flags
    region2 = conditional_contour(data, make_request(x=5.0, K=16, lam=10.0))
    assert "extrapolated" not in region2.flags


def test_response_translation_equivariance():
    data = cloud_with_covariate(120, 4)
    req = make_request(tau=0.2, K=16, lam=2.0, x=4.0)
    base = conditional_contour(data, req)
    c = np.array([1.5, -2.0])
    shifted = conditional_contour(Dataset(data.points + c, data.covariate), req)
    assert np.allclose(shifted.vertices, base.vertices + c, atol=1e-9)


def test_growth_chart_single_cell_matches_conditional():
    data = cloud_with_covariate(90, 5)
    req = make_request(tau=0.12, K=16, lam=5.0, x=3.0)
    single = conditional_contour(data, req)
    chart = growth_chart(data, [QuantileLevel(0.12)], make_grid(16), 5.0, [3.0])
    assert len(chart.entries) == 1
    assert np.allclose(chart.entries[0].region.vertices, single.vertices, atol=1e-12)


def test_growth_chart_linear_trend_translates():
    # adding a pure linear trend in x moves the region along the trend
    rng = np.random.default_rng(6)
    n = 240
    x = rng.uniform(0.0, 10.0, n)
    base_pts = rng.standard_normal((n, 2))
    trend = 0.8
    data = Dataset(base_pts + np.column_stack([trend * x, np.zeros(n)]), x)
    lam = 1e6 * max(1.0, np.ptp(data.points))
    chart = growth_chart(data, [QuantileLevel(0.1)], make_grid(16), lam, [3.0, 7.0])
    r3 = chart.entries[0].region
    r7 = chart.entries[1].region
    shift = np.array([trend * 4.0, 0.0])
    diam = data.diameter()
    moved = np.allclose(
        np.sort(r7.vertices, axis=0), np.sort(r3.vertices + shift, axis=0),
        atol=0.05 * diam)
    assert moved


def test_growth_chart_empty_entries_at_extreme_tau():
    data = cloud_with_covariate(50, 7)
    chart = growth_chart(data, [QuantileLevel(0.45)], make_grid(16), 1.0, [5.0])
    assert all(e.region.is_empty for e in chart.entries)  # typed Empty, no error


def test_growth_chart_degenerate_covariate():
    rng = np.random.default_rng(8)
    pts = rng.standard_normal((40, 2))
    data = Dataset(pts, np.zeros(40))
    chart = growth_chart(data, [QuantileLevel(0.2)], make_grid(16), 1.0, [0.0, 1.0])
    stat = contour(Dataset(pts), QuantileLevel(0.2), make_grid(16))
    for e in chart.entries:
        assert DEGENERATE_COVARIATE in e.region.flags
        assert np.allclose(e.region.vertices, stat.vertices, atol=1e-12)


def test_growth_chart_offset_monotonicity_reported():
    # per-direction fitted offsets must be nondecreasing in tau unless a
    # crossing is reported; we only assert the bookkeeping is consistent
    data = cloud_with_covariate(60, 9)
    levels = [QuantileLevel(t) for t in (0.1, 0.25, 0.4)]
    chart = growth_chart(data, levels, make_grid(12), 0.5, [2.0, 5.0, 8.0])
    for v in chart.crossings:
        assert v.gap < 0
        assert v.lower_tau < v.upper_tau
    # regions exist for every (x, tau) cell
    assert len(chart.entries) == 9


def test_growth_chart_extrapolation_warning():
    data = cloud_with_covariate(70, 10)
    chart = growth_chart(data, [QuantileLevel(0.2)], make_grid(12), 1.0,
                         [-5.0, 5.0])
    assert chart.entries[0].extrapolated
    assert not chart.entries[1].extrapolated


def test_growth_chart_is_deterministic():
    data = cloud_with_covariate(40, 11)
    args = (data, [QuantileLevel(0.2)], make_grid(8), 1.0, [3.0, 7.0])
    c1 = growth_chart(*args)
    c2 = growth_chart(*args)
    for a, b in zip(c1.entries, c2.entries):
        assert np.array_equal(a.region.vertices, b.region.vertices)
