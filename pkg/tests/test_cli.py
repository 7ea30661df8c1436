import json
import math

import numpy as np
import pytest

from quantour.cli import (
    bench,
    emit_region,
    load_region_json,
    main,
    perturb,
    read_csv,
    write_csv,
)
from quantour.contour import contour, make_grid
from quantour.errors import CSVParseError, EmptyInputError
from quantour.projquant import Dataset, QuantileLevel
from quantour.qreg import qr_linear
from quantour.testkit import gen_gaussian, gen_segment


# ---------------------------------------------------------------- read_csv

def test_read_csv_two_columns(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("1.0,2.0\n3.0,4.0\n")
    d = read_csv(p)
    assert len(d) == 2 and not d.has_covariate
    assert d.points.tolist() == [[1.0, 2.0], [3.0, 4.0]]


def test_read_csv_header_and_covariate(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("y,z,x\n1,2,0.5\n3,4,0.6\n")
    d = read_csv(p)
    assert d.has_covariate and d.covariate.tolist() == [0.5, 0.6]


def test_read_csv_parse_error_line_number(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("1.0,abc\n")
    with pytest.raises(CSVParseError) as ei:
        read_csv(p)
    assert ei.value.line_number == 1
    p.write_text("y,z\n1,2\noops,4\n")
    with pytest.raises(CSVParseError) as ei:
        read_csv(p)
    assert ei.value.line_number == 3


def test_read_csv_empty(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("")
    with pytest.raises(EmptyInputError):
        read_csv(p)
    p.write_text("y,z\n")
    with pytest.raises(EmptyInputError):
        read_csv(p)


def test_csv_round_trip(tmp_path):
    d = gen_gaussian(20, 0)
    p = tmp_path / "d.csv"
    write_csv(d, p)
    back = read_csv(p)
    assert np.array_equal(back.points, d.points)


# ----------------------------------------------------------------- perturb

def test_perturb_zero_scale_identity():
    d = gen_gaussian(30, 1)
    assert np.array_equal(perturb(d, 0.0, seed=3).points, d.points)


def test_perturb_seeded_reproducible():
    d = gen_gaussian(30, 2)
    a = perturb(d, 0.05, seed=9)
    b = perturb(d, 0.05, seed=9)
    assert np.array_equal(a.points, b.points)
    c = perturb(d, 0.05, seed=10)
    assert not np.array_equal(a.points, c.points)


def test_perturb_cures_collinear_design():
    seg = gen_segment(101, math.pi / 2, seed=0)
    jittered = perturb(seg, 0.01, seed=7)
    fit = qr_linear(np.column_stack([jittered.points[:, 0], jittered.points[:, 1]]),
                    QuantileLevel(0.5))
    assert np.isfinite(fit.objective)


# ------------------------------------------------------------ emit_region

def test_region_json_round_trip(tmp_path):
    d = gen_gaussian(120, 3)
    r = contour(d, QuantileLevel(0.2), make_grid(32))
    out = tmp_path / "r.json"
    emit_region(r, "json", out, tau=0.2, K=32)
    doc = load_region_json(out)
    assert doc["tau"] == 0.2 and doc["K"] == 32 and doc["empty"] is False
    assert np.array_equal(np.asarray(doc["vertices"]), r.vertices)  # exact


def test_region_json_empty(tmp_path):
    d = gen_gaussian(40, 4)
    r = contour(d, QuantileLevel(0.95), make_grid(16))
    out = tmp_path / "r.json"
    emit_region(r, "json", out, tau=0.95, K=16)
    doc = load_region_json(out)
    assert doc["empty"] is True and doc["vertices"] == []


def test_region_svg_contains_polygon_and_lines(tmp_path):
    d = gen_gaussian(80, 5)
    lvl = QuantileLevel(0.2)
    grid = make_grid(24)
    from quantour.contour import contour_halfplanes
    r = contour(d, lvl, grid)
    out = tmp_path / "r.svg"
    emit_region(r, "svg", out, tau=0.2, K=24,
                lines=contour_halfplanes(d, lvl, grid), data=d)
    text = out.read_text()
    assert text.count("<line ") == 24
    assert "<polygon" in text and "<svg" in text


def test_region_csv(tmp_path):
    d = gen_gaussian(50, 6)
    r = contour(d, QuantileLevel(0.2), make_grid(16))
    out = tmp_path / "r.csv"
    emit_region(r, "csv", out, tau=0.2, K=16)
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "vertex_index,vx,vy"
    assert len(lines) == 1 + len(r)


# ------------------------------------------------------------- CLI driver

def run_cli(*argv):
    return main(list(argv))


def test_cli_contour_json(tmp_path):
    src = tmp_path / "d.csv"
    write_csv(gen_gaussian(60, 7), src)
    out = tmp_path / "r.json"
    rc = run_cli("contour", str(src), "--tau", "0.2", "--k", "33",
                 "--out", str(out))
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["K"] == 33 and not doc["empty"]


def test_cli_exit_codes(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1.0,abc\n")
    assert run_cli("contour", str(bad)) == 3
    missing = tmp_path / "nope.csv"
    assert run_cli("contour", str(missing)) == 3
    # singular design -> computation error 4
    vseg = tmp_path / "vseg.csv"
    write_csv(gen_segment(51, math.pi / 2, 0), vseg)
    assert run_cli("dirqr", str(vseg)) == 4
    # usage error -> 2
    assert run_cli("contour") == 2
    assert run_cli("contour", str(vseg), "--format", "nope") == 2


def test_cli_dirqr_cure_flow(tmp_path):
    vseg = tmp_path / "vseg.csv"
    write_csv(gen_segment(101, math.pi / 2, 0), vseg)
    out = tmp_path / "p.csv"
    assert run_cli("perturb", str(vseg), "--noise", "0.01", "--seed", "7",
                   "--out", str(out)) == 0
    assert run_cli("dirqr", str(out), "--out", str(tmp_path / "f.json")) == 0
    doc = json.loads((tmp_path / "f.json").read_text())
    assert {"tau", "theta", "intercept", "slope", "objective", "line"} <= set(doc)


def test_cli_depth(tmp_path):
    src = tmp_path / "d.csv"
    write_csv(Dataset([[1, 0], [-1, 0], [0, 1], [0, -1], [0, 0]]), src)
    out = tmp_path / "depth.csv"
    assert run_cli("depth", str(src), "--out", str(out)) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "y,z,depth"
    assert lines[-1].endswith(",3")  # center: 2 halfplane points + itself


def test_cli_chart_csv(tmp_path):
    rng = np.random.default_rng(8)
    n = 50
    x = rng.uniform(0, 1, n)
    src = tmp_path / "d.csv"
    write_csv(Dataset(rng.standard_normal((n, 2)), x), src)
    out = tmp_path / "chart.csv"
    rc = run_cli("chart", str(src), "--tau", "0.1,0.2", "--k", "12",
                 "--lambda", "5", "--x-grid", "0.2:0.8:2", "--out", str(out))
    assert rc == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "x,tau,vertex_index,vx,vy"
    xs = {line.split(",")[0] for line in lines[1:]}
    taus = {line.split(",")[1] for line in lines[1:]}
    assert xs == {"0.2", "0.8"} and taus == {"0.1", "0.2"}


def test_cli_conditional(tmp_path):
    rng = np.random.default_rng(9)
    n = 60
    x = rng.uniform(0, 1, n)
    src = tmp_path / "d.csv"
    write_csv(Dataset(rng.standard_normal((n, 2)), x), src)
    out = tmp_path / "c.json"
    rc = run_cli("conditional", str(src), "--tau", "0.2", "--k", "16",
                 "--lambda", "2", "--x", "0.5", "--out", str(out))
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc["K"] == 16
    # missing covariate -> data error
    src2 = tmp_path / "d2.csv"
    write_csv(gen_gaussian(30, 1), src2)
    assert run_cli("conditional", str(src2), "--x", "0.5") == 3


def test_cli_qr(tmp_path):
    rng = np.random.default_rng(10)
    z = rng.uniform(0, 1, 40)
    y = 2 * z + 1
    src = tmp_path / "d.csv"
    write_csv(Dataset(np.column_stack([y, z])), src)
    out = tmp_path / "fit.json"
    assert run_cli("qr", str(src), "--tau", "0.5", "--out", str(out)) == 0
    doc = json.loads(out.read_text())
    assert abs(doc["intercept"] - 1.0) < 1e-8 and abs(doc["slope"] - 2.0) < 1e-8


# ----------------------------------------------------------------- bench

def test_bench_report_shape():
    rep = bench(n=5000, K=16, repetitions=3, seed=0)
    assert len(rep.base.samples) == 3
    assert rep.base.n == 5000 and rep.doubled_n.n == 10000
    assert rep.doubled_k.K == 32
    assert rep.ratio_n > 0 and rep.ratio_k > 0
    d = rep.as_dict()
    assert {"backend", "configs", "ratio_n", "ratio_k"} <= set(d)


def test_cli_bench_json(tmp_path):
    out = tmp_path / "b.json"
    rc = run_cli("bench", "--n", "2000", "--k", "8", "--reps", "2",
                 "--format", "json", "--out", str(out))
    assert rc == 0
    doc = json.loads(out.read_text())
    assert doc[0]["configs"][0]["n"] == 2000


def test_cli_bench_both_backends(tmp_path):
    out = tmp_path / "b.json"
    rc = run_cli("bench", "--n", "2000", "--k", "8", "--reps", "1",
                 "--backend", "both", "--format", "json", "--out", str(out))
    assert rc == 0
    doc = json.loads(out.read_text())
    backends = {r["backend"] for r in doc}
    from quantour import _kernels
    assert backends == set(_kernels.available_backends())
