import csv
import json
import math
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from geoharm.cli import main

SMALL = {
    "fuzz": {"seed": 3, "n_maps": 2, "n_points": 5},
    "samples": {"n_radii": 50, "n_maps": 2, "n_points": 20, "n_random_metrics": 1},
}


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_verify_passes_and_writes_reports(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", SMALL)
    out = tmp_path / "out"
    assert main(["verify", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["passed"] is True
    assert set(report["suites"]) == {"metric", "geodesic", "harmonic", "hopf", "schwarz", "sharpness", "fuzz"}
    assert (out / "fuzz_hyperbolic.csv").exists()
    header = (out / "fuzz_spherical.csv").read_text().splitlines()[0]
    assert header == "inequality,seed,map_index,z_re,z_im,w_re,w_im,lhs,rhs,margin,rel_margin"
    assert "PASS" in capsys.readouterr().out


def test_verify_unachievable_tolerance_exits_1(tmp_path):
    cfg = write(tmp_path, "c.json", dict(SMALL, suites=["harmonic"], tolerances={"residual": 1e-30}))
    out = tmp_path / "out"
    assert main(["verify", cfg, "--out", str(out)]) == 1
    assert json.loads((out / "report.json").read_text())["passed"] is False


def test_verify_config_errors_exit_2(tmp_path, capsys):
    assert main(["verify", str(tmp_path / "missing.json")]) == 2
    assert "cannot read config" in capsys.readouterr().err
    bad = write(tmp_path, "bad.json", {"suites": ["metric"], "unknown": 1})
    assert main(["verify", bad]) == 2
    cfg = write(tmp_path, "c.json", SMALL)
    assert main(["verify", cfg, "--seed", str(2**64)]) == 2
    assert main(["frobnicate"]) == 2


def test_verify_is_deterministic_across_threads(tmp_path, monkeypatch):
    cfg = write(tmp_path, "c.json", dict(SMALL, suites=["fuzz", "schwarz"]))
    outs = []
    for threads in ("1", "4"):
        monkeypatch.setenv("GEOHARM_THREADS", threads)
        out = tmp_path / f"out{threads}"
        assert main(["verify", cfg, "--out", str(out)]) == 0
        outs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    assert outs[0] == outs[1]


def test_seed_override_changes_fuzz(tmp_path):
    cfg = write(tmp_path, "c.json", dict(SMALL, suites=["fuzz"]))
    a, b = tmp_path / "a", tmp_path / "b"
    main(["verify", cfg, "--out", str(a)])
    main(["verify", cfg, "--out", str(b), "--seed", "99"])
    assert (a / "fuzz_hyperbolic.csv").read_bytes() != (b / "fuzz_hyperbolic.csv").read_bytes()
    assert json.loads((b / "report.json").read_text())["config"]["fuzz"]["seed"] == 99


def test_sweep_n2(tmp_path):
    cfg = write(tmp_path, "c.json", {})
    out = tmp_path / "out"
    assert main(["sweep", cfg, "--ineq", "thm1_distance", "--n", "2", "--out", str(out)]) == 0
    lines = (out / "sweep_thm1_distance.csv").read_text().splitlines()
    assert lines[0] == "i,j,z_re,z_im,lhs,rhs,margin,rel_margin,status"
    assert len(lines) == 5


def test_sweep_extremal_column_and_svg(tmp_path):
    cfg = write(tmp_path, "c.json", {"sweep": {"family": "extremal", "kind": "hyperbolic"}})
    out = tmp_path / "out"
    assert main(["sweep", cfg, "--ineq", "thm1_distance", "--n", "101", "--svg", "--out", str(out)]) == 0
    rows = read_rows(out / "sweep_thm1_distance.csv")
    assert len(rows) == 101 * 101
    column = [float(r["margin"]) for r in rows if r["i"] == "50" and r["status"] == "ok"]
    assert float(rows[50]["z_re"]) == 0.0
    assert min(column) <= 1e-8
    assert all(abs(m) <= 1e-8 for m in column)
    for r in rows:
        z = complex(float(r["z_re"]), float(r["z_im"]))
        assert (r["status"] == "skipped") == (abs(z) > 1 - 1 / 101)
    root = ET.parse(out / "sweep_thm1_distance.svg").getroot()
    assert sum(1 for e in root.iter() if e.tag.endswith("rect")) == 101 * 101


@pytest.mark.parametrize("ineq", ["classical_schwarz", "colonna", "thm1_gradient", "qpo_lipschitz"])
def test_sweep_other_bounds(tmp_path, ineq):
    cfg = write(tmp_path, "c.json", {"sweep": {"family": "random", "kind": "spherical", "r": 1.0, "w": [0.1, 0.2]}})
    out = tmp_path / "out"
    assert main(["sweep", cfg, "--ineq", ineq, "--n", "9", "--out", str(out)]) == 0
    rows = read_rows(out / f"sweep_{ineq}.csv")
    assert all(r["status"] in ("ok", "skipped") for r in rows)


def test_sweep_rejects_small_grid(tmp_path):
    cfg = write(tmp_path, "c.json", {})
    assert main(["sweep", cfg, "--ineq", "colonna", "--n", "1"]) == 2


def _geodesic(tmp_path, *args):
    out = tmp_path / "path.csv"
    code = main(["geodesic", *args, "--out", str(out)])
    return code, (read_rows(out) if code == 0 else None)


def test_geodesic_examples(tmp_path):
    code, rows = _geodesic(tmp_path, "--metric", "euclidean", "--x0", "0", "--angle", "0", "--smax", "1")
    assert code == 0 and float(rows[-1]["x"]) == pytest.approx(1, abs=1e-14)
    s = repr(math.atanh(0.5))
    code, rows = _geodesic(tmp_path, "--metric", "hyperbolic", "--x0", "0", "--angle", "0", "--smax", s)
    assert float(rows[-1]["x"]) == pytest.approx(0.5, abs=1e-8)
    base = rows
    code, rows = _geodesic(tmp_path, "--metric", "hyperbolic", "--x0", "0", "--angle", repr(math.pi / 4), "--smax", s)
    assert len(rows) == len(base)
    c = math.sqrt(0.5)
    for a, b in zip(base, rows):
        assert float(b["x"]) == pytest.approx(c * float(a["x"]), abs=1e-8)
        assert float(b["y"]) == pytest.approx(c * float(a["x"]), abs=1e-8)
    assert all(float(r["metric_speed"]) == pytest.approx(1.0, abs=1e-8) for r in rows)


def test_geodesic_metric_descriptor_forms(tmp_path):
    code, rows = _geodesic(tmp_path, "--metric", '{"profile": "1/(1+t)", "chart_radius": "inf"}', "--x0", "0.1", "--angle", "0.3", "--smax", "0.5")
    assert code == 0 and len(rows) > 1
    code, _ = _geodesic(tmp_path, "--metric", "exp(0.2*t)", "--x0", "0.1", "--angle", "0.3", "--smax", "0.5")
    assert code == 0


def test_geodesic_bad_inputs(tmp_path, capsys):
    assert _geodesic(tmp_path, "--metric", "1/(1+t", "--x0", "0", "--angle", "0", "--smax", "1")[0] == 2
    assert "offset 6" in capsys.readouterr().err
    assert _geodesic(tmp_path, "--metric", "hyperbolic", "--x0", "2", "--angle", "0", "--smax", "1")[0] == 2
    assert _geodesic(tmp_path, "--metric", "hyperbolic", "--x0", "0", "--angle", "0", "--smax", "-1")[0] == 2
    assert _geodesic(tmp_path, "--metric", "hyperbolic", "--x0", "nan", "--angle", "0", "--smax", "1")[0] == 2
    assert _geodesic(tmp_path, "--metric", "{bad", "--x0", "0", "--angle", "0", "--smax", "1")[0] == 2


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "geoharm.cli", "geodesic", "--metric", "euclidean", "--x0", "0", "--angle", "0", "--smax", "0.5"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "s,x,y,vx,vy,metric_speed"
