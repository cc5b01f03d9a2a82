"""Command-line behavior: artifacts, formats, exit codes, determinism.

Most tests drive main(argv) in process; one exercises the installed
`wavetrans` entry point end to end through a synth/reconstruct pipeline.
"""

import json
import math
import subprocess
import shutil

import numpy as np
import pytest

from wavetrans import Environment, ShearProfile
from wavetrans.cli import main

G = 9.81


def _read_csv(path):
    meta, header, rows = {}, None, []
    for line in path.read_text().splitlines():
        if line.startswith("# "):
            key, _, val = line[2:].partition(": ")
            meta[key] = val
        elif header is None:
            header = line.split(",")
        else:
            rows.append(line.split(","))
    return meta, header, rows


def test_dispersion_single_k(tmp_path):
    assert main(["dispersion", "--shear", "zero", "--h0", "2", "--k", "1",
                 "--out", str(tmp_path), "--no-plot"]) == 0
    meta, header, rows = _read_csv(tmp_path / "dispersion.csv")
    assert header == ["k", "c", "residual"]
    assert len(rows) == 1
    c = float(rows[0][1])
    assert abs(c - 3.0752415450728945) < 1e-12  # pinned numerical root
    assert abs(c - math.sqrt(G * math.tanh(2.0))) < 1e-8
    assert not (tmp_path / "dispersion.png").exists()


def test_reruns_are_byte_identical(tmp_path):
    argv = ["dispersion", "--shear", "linear", "--gamma", "-1", "--h0", "2",
            "--k-min", "0.3", "--k-max", "3", "--count", "5", "--no-plot"]
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert (a / "dispersion.csv").read_bytes() == \
        (b / "dispersion.csv").read_bytes()


def test_dispersion_renders_figure(tmp_path):
    assert main(["dispersion", "--shear", "zero", "--h0", "2",
                 "--k-min", "0.5", "--k-max", "2", "--count", "4",
                 "--out", str(tmp_path)]) == 0
    png = tmp_path / "dispersion.png"
    assert png.exists() and png.stat().st_size > 1024


def test_transfer_table_and_meta(tmp_path):
    assert main(["transfer", "--shear", "linear", "--gamma", "-5",
                 "--h0", "2", "--k", "1", "--out", str(tmp_path),
                 "--no-plot"]) == 0
    meta, header, rows = _read_csv(tmp_path / "transfer.csv")
    assert header == ["y", "T"]
    assert float(rows[0][0]) == 0.0
    assert float(rows[0][1]) == float(meta["T0"])
    assert abs(float(rows[-1][0]) - 2.0) < 1e-12
    assert abs(float(rows[-1][1]) - G) < 1e-6  # surface pins T to g
    assert abs(float(meta["c"]) - 6.317183346417465) < 1e-8
    assert abs(float(meta["gain"]) * float(meta["T0"]) - 1.0) < 1e-12


def test_stagnation_row(tmp_path):
    assert main(["stagnation", "--gamma", "-5", "--k", "1", "--h0", "2",
                 "--out", str(tmp_path), "--no-plot"]) == 0
    _, header, rows = _read_csv(tmp_path / "stagnation.csv")
    row = dict(zip(header, rows[0]))
    assert abs(float(row["threshold"]) - 4.564364059631952) < 1e-10
    assert row["stagnation"] == "true"


def test_burns_roots(tmp_path):
    assert main(["burns", "--shear", "linear", "--gamma", "1", "--h0", "2",
                 "--out", str(tmp_path), "--no-plot"]) == 0
    _, _, rows = _read_csv(tmp_path / "burns.csv")
    cs = sorted(float(r[0]) for r in rows)
    # Quadrature-backed root, so closed-form agreement is ~1e-12 relative.
    assert any(abs(c - 3.5409250158970913) < 1e-9 for c in cs)


def test_field_grid_shape(tmp_path):
    assert main(["field", "--shear", "zero", "--h0", "2", "--k", "1",
                 "--amplitude", "0.1", "--nx", "8", "--npts", "9",
                 "--out", str(tmp_path), "--no-plot"]) == 0
    _, header, rows = _read_csv(tmp_path / "field.csv")
    assert header == ["x", "y", "u", "v", "p"]
    assert len(rows) == 8 * 9
    surface = [r for r in rows
               if abs(float(r[1]) - 2.0) < 1e-12 and float(r[0]) == 0.0]
    assert abs(float(surface[0][4]) - G * 0.1) < 1e-6  # p = g a at a crest


def test_twofluid_from_env_file(tmp_path):
    env = {"shear": {"kind": "zero"}, "upper": {"kind": "zero"},
           "rho_minus": 1000.0, "rho_plus": 1.2, "h0": 2.0, "H": 3.0,
           "sigma": 0.0, "g": G}
    env_path = tmp_path / "two.json"
    env_path.write_text(json.dumps(env))
    assert main(["twofluid", "--env", str(env_path), "--k", "1",
                 "--out", str(tmp_path), "--no-plot"]) == 0
    meta, header, rows = _read_csv(tmp_path / "twofluid.csv")
    assert abs(float(meta["c"]) - 3.0710643152780728) < 1e-10
    layers = {r[0] for r in rows}
    assert layers == {"lower", "upper"}


def test_env_file_and_config_dir_fallback(tmp_path, monkeypatch):
    conf = tmp_path / "conf"
    conf.mkdir()
    env = Environment(shear=ShearProfile.linear(-1.0, 2.0), density=None,
                      h0=2.0, g=G)
    (conf / "site.json").write_text(json.dumps(env.to_json()))
    monkeypatch.setenv("WAVETRANS_CONFIG_DIR", str(conf))
    out = tmp_path / "out"
    assert main(["dispersion", "--env", "site.json", "--k", "1",
                 "--out", str(out), "--no-plot"]) == 0
    _, _, rows = _read_csv(out / "dispersion.csv")
    assert abs(float(rows[0][1]) - 3.5948015846571417) < 1e-8


def test_json_format_marks_flagged_bins_null(tmp_path):
    assert main(["synth", "--shear", "zero", "--h0", "2",
                 "--mode", "0.8,0.5", "--mode", "4.0,0.3,0.2",
                 "--duration", "200", "--dt", "0.25",
                 "--out", str(tmp_path), "--no-plot"]) == 0
    assert main(["reconstruct", "--gauge", str(tmp_path / "gauge.csv"),
                 "--shear", "zero", "--h0", "2", "--k-max", "2.0",
                 "--format", "json", "--out", str(tmp_path),
                 "--no-plot"]) == 0
    doc = json.loads((tmp_path / "modes.json").read_text())
    assert doc["columns"] == ["omega", "k", "gain", "kept"]
    flagged = [r for r in doc["rows"] if r[3] is False]
    assert len(flagged) == 1
    assert flagged[0][1] is None and flagged[0][2] is None
    eta = json.loads((tmp_path / "eta.json").read_text())
    assert eta["meta"]["tool"].startswith("wavetrans ")


def test_synth_sidecar_carries_solved_modes(tmp_path):
    assert main(["synth", "--shear", "zero", "--h0", "2",
                 "--mode", "1.0,0.5,0.3", "--duration", "60", "--dt", "0.25",
                 "--out", str(tmp_path), "--no-plot"]) == 0
    side = json.loads((tmp_path / "gauge.meta.json").read_text())
    assert side["pressure_kind"] == "dynamic"
    assert len(side["modes"]) == 1
    assert abs(side["modes"][0]["k"] - 1.0) < 0.05  # bin-snapped wavenumber


def test_usage_errors_exit_2_without_artifacts(tmp_path):
    out = tmp_path / "o1"
    assert main(["dispersion", "--shear", "linear", "--h0", "2", "--k", "1",
                 "--out", str(out), "--no-plot"]) == 2  # missing --gamma
    assert list(out.iterdir()) == []
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["dispersion", "--env", str(bad), "--k", "1",
                 "--out", str(out), "--no-plot"]) == 2
    bogus = tmp_path / "bogus.json"
    bogus.write_text(json.dumps({"shear": {"kind": "solid"}, "h0": 2.0,
                                 "g": G}))
    assert main(["dispersion", "--env", str(bogus), "--k", "1",
                 "--out", str(out), "--no-plot"]) == 2
    assert main(["reconstruct", "--gauge", str(tmp_path / "absent.csv"),
                 "--shear", "zero", "--h0", "2",
                 "--out", str(out), "--no-plot"]) == 2
    assert main(["dispersion", "--shear", "zero", "--h0", "-2", "--k", "1",
                 "--out", str(out), "--no-plot"]) == 2
    assert list(out.iterdir()) == []


def test_computation_errors_exit_1_without_artifacts(tmp_path):
    assert main(["synth", "--shear", "zero", "--h0", "2", "--mode", "1.0,0.5",
                 "--duration", "60", "--dt", "0.25",
                 "--out", str(tmp_path), "--no-plot"]) == 0
    out = tmp_path / "mismatch"
    code = main(["reconstruct", "--gauge", str(tmp_path / "gauge.csv"),
                 "--shear", "zero", "--h0", "3",
                 "--out", str(out), "--no-plot"])
    assert code == 1  # record was taken in a different water depth
    assert list(out.iterdir()) == []


def test_version_flag():
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0


def test_entry_point_pipeline(tmp_path):
    exe = shutil.which("wavetrans")
    assert exe, "console script not installed; run pip install -e ."
    # Sampling chosen so crest and trough land exactly on samples: bin 64
    # of 1024 puts 16 samples per period.
    omega = math.sqrt(G * math.tanh(2.0))
    n, m = 1024, 64
    dt = 2.0 * math.pi * m / (omega * n)
    duration = (n - 0.5) * dt
    r1 = subprocess.run(
        [exe, "synth", "--shear", "zero", "--h0", "2", "--mode", "1.0,1.0",
         "--duration", repr(duration), "--dt", repr(dt),
         "--out", str(tmp_path), "--no-plot"],
        capture_output=True, text=True)
    assert r1.returncode == 0, r1.stderr
    r2 = subprocess.run(
        [exe, "reconstruct", "--gauge", str(tmp_path / "gauge.csv"),
         "--shear", "zero", "--h0", "2", "--out", str(tmp_path)],
        capture_output=True, text=True)
    assert r2.returncode == 0, r2.stderr
    _, header, rows = _read_csv(tmp_path / "eta.csv")
    assert header == ["t", "eta"]
    eta = np.array([float(r[1]) for r in rows])
    assert len(eta) == n
    assert abs((eta.max() - eta.min()) / 2.0 - 1.0) < 1e-6
    png = tmp_path / "reconstruction.png"
    assert png.exists() and png.stat().st_size > 1024
