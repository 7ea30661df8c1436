"""Command-line surface.

Commands: contour, depth, qr, dirqr, conditional, chart, perturb, bench.
Exit codes: 0 success, 2 usage error, 3 data error (unreadable/malformed
input, missing covariate, I/O), 4 computation error (singular design,
size guards, solver contract breaches).

All randomness (perturb noise, bench clouds) flows through one seeded
generator per invocation; nothing consults ambient entropy.
"""

from __future__ import annotations

import argparse
import json
import math
import statistics
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .conditional import ConditionalContourRequest, conditional_contour, growth_chart
from .contour import ContourRegion, contour, contour_halfplanes, make_grid
from .errors import (
    COMPUTATION_ERRORS,
    CSVParseError,
    DATA_ERRORS,
    EmptyInputError,
)
from .oracle import exact_depth
from .projquant import Dataset, Direction, Halfplane, QuantileLevel
from .qreg import directional_regression_quantile, qr_linear

__all__ = [
    "read_csv",
    "write_csv",
    "perturb",
    "emit_region",
    "region_json_dict",
    "load_region_json",
    "bench",
    "BenchReport",
    "main",
]


# ---------------------------------------------------------------- data I/O

def read_csv(path) -> Dataset:
    """Dataset from a CSV of 2 or 3 numeric columns (y, z [, x]).

    A single header row is auto-detected when no field of the first row
    parses as a number.  Malformed rows report their 1-based line number.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as e:
        raise EmptyInputError(f"cannot read {path}: {e}") from e

    rows = []
    ncols = None
    first_data_row = True
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text:
            continue
        fields = [f.strip() for f in text.split(",")]
        parsed = []
        bad = False
        for f in fields:
            try:
                parsed.append(float(f))
            except ValueError:
                bad = True
                break
        if bad:
            if first_data_row and all(not _is_number(f) for f in fields):
                first_data_row = False
                continue  # header row
            raise CSVParseError(lineno, f"non-numeric field in {text!r}")
        first_data_row = False
        if len(parsed) not in (2, 3):
            raise CSVParseError(lineno, f"expected 2 or 3 columns, got {len(parsed)}")
        if ncols is None:
            ncols = len(parsed)
        elif len(parsed) != ncols:
            raise CSVParseError(lineno, f"expected {ncols} columns, got {len(parsed)}")
        rows.append(parsed)
    if not rows:
        raise EmptyInputError(f"no data rows in {path}")
    arr = np.asarray(rows, dtype=np.float64)
    if ncols == 3:
        return Dataset(arr[:, :2], arr[:, 2])
    return Dataset(arr)


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def write_csv(data: Dataset, path):
    with open(path, "w", encoding="utf-8") as fh:
        if data.has_covariate:
            fh.write("y,z,x\n")
            for (py, pz), x in zip(data.points, data.covariate):
                fh.write(f"{float(py)!r},{float(pz)!r},{float(x)!r}\n")
        else:
            fh.write("y,z\n")
            for py, pz in data.points:
                fh.write(f"{float(py)!r},{float(pz)!r}\n")


def perturb(data: Dataset, scale: float, seed: int) -> Dataset:
    """Add seeded uniform noise in [-s, s]^2, s = scale * bbox diagonal.

    The cure for perfectly collinear designs; identical seeds give
    bit-identical outputs and scale 0 returns the data unchanged.
    """
    scale = float(scale)
    if scale < 0.0:
        raise ValueError("noise scale must be >= 0")
    s = scale * data.bounding_box_diagonal()
    rng = np.random.default_rng(seed)
    noise = rng.uniform(-s, s, size=data.points.shape)
    return Dataset(data.points + noise, data.covariate)


# ------------------------------------------------------------- emission

def region_json_dict(region: ContourRegion, tau: float, K: int) -> dict:
    return {
        "tau": float(tau),
        "K": int(K),
        "empty": bool(region.is_empty),
        "vertices": [[float(x), float(y)] for x, y in region.vertices],
    }


def load_region_json(path):
    """Inverse of the JSON emission (test helper); vertices round-trip exactly."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return doc


def _view_bounds(region, data=None, pad=0.08):
    pts = []
    if region is not None and not region.is_empty:
        pts.append(region.vertices)
    if data is not None:
        pts.append(data.points)
    if not pts:
        return -1.0, -1.0, 1.0, 1.0
    allp = np.vstack(pts)
    lo = allp.min(axis=0)
    hi = allp.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    lo = lo - pad * span
    hi = hi + pad * span
    return float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1])


def _clip_line_to_box(normal, offset, x0, y0, x1, y1):
    """Segment of the line {n . p = offset} inside the box, or None."""
    nx, ny = normal
    p0 = np.array([nx * offset, ny * offset])
    t = np.array([-ny, nx])
    lo, hi = -np.inf, np.inf
    for comp, a, b in ((0, x0, x1), (1, y0, y1)):
        if abs(t[comp]) < 1e-300:
            if not a <= p0[comp] <= b:
                return None
            continue
        ta = (a - p0[comp]) / t[comp]
        tb = (b - p0[comp]) / t[comp]
        ta, tb = min(ta, tb), max(ta, tb)
        lo, hi = max(lo, ta), min(hi, tb)
    if not lo < hi:
        return None
    return p0 + lo * t, p0 + hi * t


def render_svg(region, *, tau=None, data=None, lines=None, size=640):
    """SVG 1.1 plot: region polygon, optional quantile boundary lines and
    data points (the family-of-directional-quantile-lines view)."""
    x0, y0, x1, y1 = _view_bounds(region, data)
    sx = size / (x1 - x0)
    sy = size / (y1 - y0)

    def tx(p):
        return (p[0] - x0) * sx, (y1 - p[1]) * sy

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    if tau is not None:
        parts.append(f'<title>quantile contour tau={tau}</title>')
    if lines:
        for hp in lines:
            seg = _clip_line_to_box(hp.normal.vector, hp.offset, x0, y0, x1, y1)
            if seg is None:
                continue
            (ax, ay), (bx, by) = tx(seg[0]), tx(seg[1])
            parts.append(
                f'<line x1="{ax:.2f}" y1="{ay:.2f}" x2="{bx:.2f}" y2="{by:.2f}" '
                f'stroke="#9ecae1" stroke-width="0.6"/>')
    if data is not None:
        for p in data.points:
            px, py = tx(p)
            parts.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="1.6" fill="#555"/>')
    if region is not None and not region.is_empty:
        coords = " ".join(f"{x:.3f},{y:.3f}" for x, y in map(tx, region.vertices))
        parts.append(
            f'<polygon points="{coords}" fill="none" stroke="#d62728" stroke-width="2"/>')
    parts.append("</svg>")
    return "\n".join(parts)


def emit_region(region: ContourRegion, fmt, path, *, tau, K,
                lines=None, data=None):
    """Write a region as JSON (schema: tau, K, empty, vertices), SVG or CSV."""
    if fmt == "json":
        _write_text(path, json.dumps(region_json_dict(region, tau, K)) + "\n")
    elif fmt == "svg":
        _write_text(path, render_svg(region, tau=tau, data=data, lines=lines) + "\n")
    elif fmt == "csv":
        rows = ["vertex_index,vx,vy"]
        rows += [f"{i},{float(x)!r},{float(y)!r}"
                 for i, (x, y) in enumerate(region.vertices)]
        _write_text(path, "\n".join(rows) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")


def _write_text(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# ------------------------------------------------------------- benchmark

@dataclass(frozen=True)
class BenchConfig:
    n: int
    K: int
    samples: tuple
    median: float


@dataclass(frozen=True)
class BenchReport:
    backend: str
    base: BenchConfig
    doubled_n: BenchConfig
    doubled_k: BenchConfig

    @property
    def ratio_n(self):
        return self.doubled_n.median / self.base.median

    @property
    def ratio_k(self):
        return self.doubled_k.median / self.base.median

    def lines(self):
        out = [f"backend={self.backend}"]
        for cfg in (self.base, self.doubled_n, self.doubled_k):
            samples = ", ".join(f"{s:.3f}" for s in cfg.samples)
            out.append(f"  n={cfg.n:>9d} K={cfg.K:>6d}  median={cfg.median:.3f}s"
                       f"  samples=[{samples}]")
        out.append(f"  n-doubling ratio={self.ratio_n:.2f}"
                   f"  K-doubling ratio={self.ratio_k:.2f}")
        return out

    def as_dict(self):
        return {
            "backend": self.backend,
            "configs": [
                {"n": c.n, "K": c.K, "samples": list(c.samples), "median": c.median}
                for c in (self.base, self.doubled_n, self.doubled_k)
            ],
            "ratio_n": self.ratio_n,
            "ratio_k": self.ratio_k,
        }


def _time_contour(points, K, repetitions, tau):
    grid = make_grid(K)
    level = QuantileLevel(tau)
    data = Dataset(points)
    samples = []
    for _ in range(repetitions):
        t0 = time.perf_counter()
        contour(data, level, grid)
        samples.append(time.perf_counter() - t0)
    return BenchConfig(points.shape[0], K, tuple(samples),
                       statistics.median(samples))


def bench(n, K, repetitions=3, seed=0, backend=None, tau=0.1) -> BenchReport:
    """Time contour construction on seeded Gaussian clouds.

    Reports the median over ``repetitions`` for (n, K) plus the
    n-doubling and K-doubling configurations and their time ratios.
    """
    if min(n, K, repetitions) < 1:
        raise ValueError("bench parameters must be positive")
    rng = np.random.default_rng(seed)
    cloud = rng.standard_normal((2 * n, 2))
    name = backend or _kernels.active_name()
    with _kernels.use(name):
        base = _time_contour(cloud[:n], K, repetitions, tau)
        dn = _time_contour(cloud, K, repetitions, tau)
        dk = _time_contour(cloud[:n], 2 * K, repetitions, tau)
    return BenchReport(name, base, dn, dk)


# ------------------------------------------------------------------ CLI

def _add_io_flags(p, fmt_default="json"):
    p.add_argument("--format", choices=["json", "svg", "csv"], default=fmt_default)
    p.add_argument("--out", metavar="PATH", default=None)


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="quantour",
        description="Approximate depth contours from directional projection quantiles.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("contour", help="static depth contour")
    p.add_argument("input")
    p.add_argument("--tau", type=float, default=0.1)
    p.add_argument("--k", type=int, default=201)
    p.add_argument("--lines", action="store_true",
                   help="include the K quantile boundary lines in SVG output")
    _add_io_flags(p)

    p = sub.add_parser("depth", help="exact halfspace depth of every data point")
    p.add_argument("input")
    _add_io_flags(p, fmt_default="csv")

    p = sub.add_parser("qr", help="linear quantile regression of y on z")
    p.add_argument("input")
    p.add_argument("--tau", type=float, default=0.5)
    _add_io_flags(p)

    p = sub.add_parser("dirqr", help="directional regression quantile "
                                     "(ordinate direction by default)")
    p.add_argument("input")
    p.add_argument("--tau", type=float, default=0.5)
    p.add_argument("--k", type=int, default=None,
                   help="sweep a K-direction grid instead of the single ordinate")
    p.add_argument("--lines", action="store_true")
    _add_io_flags(p)

    p = sub.add_parser("conditional", help="conditional contour at one covariate value")
    p.add_argument("input")
    p.add_argument("--tau", type=float, default=0.1)
    p.add_argument("--k", type=int, default=201)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--x", type=float, required=True)
    _add_io_flags(p)

    p = sub.add_parser("chart", help="growth chart over a covariate grid")
    p.add_argument("input")
    p.add_argument("--tau", type=str, default="0.1",
                   help="level or comma-separated levels")
    p.add_argument("--k", type=int, default=201)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--x-grid", type=str, required=True, metavar="A:B:STEPS")
    _add_io_flags(p, fmt_default="csv")

    p = sub.add_parser("perturb", help="add seeded uniform noise to a dataset")
    p.add_argument("input")
    p.add_argument("--noise", type=float, default=0.01,
                   help="scale relative to the bounding-box diagonal")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="PATH", required=True)

    p = sub.add_parser("bench", help="timing harness for contour construction")
    p.add_argument("--n", type=int, default=1_000_000)
    p.add_argument("--k", type=int, default=1000)
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend", choices=["auto", "compiled", "python", "both"],
                   default="auto")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--out", metavar="PATH", default=None)
    return ap


def _parse_taus(text):
    taus = []
    for part in str(text).split(","):
        part = part.strip()
        if part:
            taus.append(QuantileLevel(float(part)))
    if not taus:
        raise ValueError("no tau levels given")
    return taus


def _parse_x_grid(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError("--x-grid expects A:B:STEPS")
    a, b, steps = float(parts[0]), float(parts[1]), int(parts[2])
    if steps < 1:
        raise ValueError("--x-grid needs at least 1 step")
    return np.linspace(a, b, steps)


def _cmd_contour(args):
    data = read_csv(args.input)
    level = QuantileLevel(args.tau)
    grid = make_grid(args.k)
    region = contour(data, level, grid)
    lines = contour_halfplanes(data, level, grid) if (args.lines and args.format == "svg") else None
    emit_region(region, args.format, args.out, tau=level.tau, K=grid.count,
                lines=lines, data=data if args.format == "svg" else None)
    return 0


def _cmd_depth(args):
    data = read_csv(args.input)
    depths = [exact_depth(data, p).depth for p in data.points]
    if args.format == "json":
        doc = [{"point": [float(py), float(pz)], "depth": int(d)}
               for (py, pz), d in zip(data.points, depths)]
        _write_text(args.out, json.dumps(doc) + "\n")
    else:
        rows = ["y,z,depth"]
        rows += [f"{float(py)!r},{float(pz)!r},{d}"
                 for (py, pz), d in zip(data.points, depths)]
        _write_text(args.out, "\n".join(rows) + "\n")
    return 0


def _cmd_qr(args):
    data = read_csv(args.input)
    level = QuantileLevel(args.tau)
    # CSV columns are (y, z); regress y on z
    fit = qr_linear(np.column_stack([data.points[:, 1], data.points[:, 0]]), level)
    doc = {"tau": level.tau, "intercept": fit.intercept, "slope": fit.slope,
           "objective": fit.objective}
    _write_text(args.out, json.dumps(doc) + "\n")
    return 0


def _dirqr_line_halfplane(dfit):
    return Halfplane(Direction.from_vector(*dfit.line_normal), dfit.line_offset)


def _cmd_dirqr(args):
    data = read_csv(args.input)
    level = QuantileLevel(args.tau)
    if args.k is None:
        directions = [Direction(0.5 * math.pi)]
    else:
        grid = make_grid(args.k)
        directions = [Direction(t) for t in grid.thetas]
    fits = [directional_regression_quantile(data, d, level) for d in directions]
    if args.format == "svg":
        lines = [_dirqr_line_halfplane(f) for f in fits]
        _write_text(args.out, render_svg(None, data=data, lines=lines) + "\n")
        return 0
    doc = [{
        "tau": level.tau,
        "theta": f.direction.theta,
        "intercept": f.fit.intercept,
        "slope": f.fit.slope,
        "objective": f.fit.objective,
        "line": {"normal": [float(f.line_normal[0]), float(f.line_normal[1])],
                 "offset": float(f.line_offset)},
    } for f in fits]
    _write_text(args.out, json.dumps(doc[0] if args.k is None else doc) + "\n")
    return 0


def _cmd_conditional(args):
    data = read_csv(args.input)
    req = ConditionalContourRequest(
        level=QuantileLevel(args.tau), grid=make_grid(args.k),
        penalty_weight=args.lam, query_x=args.x)
    region = conditional_contour(data, req)
    for flag in region.flags:
        print(f"warning: {flag}", file=sys.stderr)
    emit_region(region, args.format, args.out, tau=args.tau, K=args.k,
                data=data if args.format == "svg" else None)
    return 0


def _cmd_chart(args):
    data = read_csv(args.input)
    levels = _parse_taus(args.tau)
    x_grid = _parse_x_grid(args.x_grid)
    chart = growth_chart(data, levels, make_grid(args.k), args.lam, x_grid)
    for v in chart.crossings:
        print(f"warning: quantile crossing at direction {v.direction_index}, "
              f"x={v.query_x:g}, tau {v.lower_tau:g}->{v.upper_tau:g} "
              f"(gap {v.gap:.3g})", file=sys.stderr)
    if any(e.extrapolated for e in chart.entries):
        print("warning: some chart entries extrapolate outside the covariate range",
              file=sys.stderr)
    if args.format == "json":
        doc = [{
            "x": e.query_x,
            "tau": e.level.tau,
            "empty": e.region.is_empty,
            "extrapolated": e.extrapolated,
            "vertices": [[float(x), float(y)] for x, y in e.region.vertices],
        } for e in chart.entries]
        _write_text(args.out, json.dumps(doc) + "\n")
    else:
        rows = ["x,tau,vertex_index,vx,vy"]
        for e in chart.entries:
            rows += [f"{e.query_x!r},{e.level.tau!r},{i},{float(x)!r},{float(y)!r}"
                     for i, (x, y) in enumerate(e.region.vertices)]
        _write_text(args.out, "\n".join(rows) + "\n")
    return 0


def _cmd_perturb(args):
    data = read_csv(args.input)
    write_csv(perturb(data, args.noise, args.seed), args.out)
    return 0


def _cmd_bench(args):
    backends = ([_kernels.active_name()] if args.backend == "auto"
                else list(_kernels.available_backends()) if args.backend == "both"
                else [args.backend])
    reports = [bench(args.n, args.k, args.reps, args.seed, backend=b)
               for b in backends]
    if args.format == "json":
        _write_text(args.out, json.dumps([r.as_dict() for r in reports]) + "\n")
    else:
        text = "\n".join(line for r in reports for line in r.lines())
        _write_text(args.out, text + "\n")
    return 0


_COMMANDS = {
    "contour": _cmd_contour,
    "depth": _cmd_depth,
    "qr": _cmd_qr,
    "dirqr": _cmd_dirqr,
    "conditional": _cmd_conditional,
    "chart": _cmd_chart,
    "perturb": _cmd_perturb,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except DATA_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except COMPUTATION_ERRORS as e:
        print(f"error: {e.__class__.__name__}: {e}", file=sys.stderr)
        return 4
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
