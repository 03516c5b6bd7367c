"""End-to-end CLI tests exercising every subcommand through run()."""

import json
import os

import numpy as np
import pytest

from covlab.cli import run, _parse_grid, InputError


@pytest.fixture
def bodies(tmp_path):
    paths = {}
    specs = {
        "interval": {"type": "ball", "radius": 5.0, "dim": 1},
        "ellipse": {"type": "ellipsoid", "semiaxes": [3.0, 1.0]},
        "hexagon": {"type": "vpolytope",
                    "vertices": [[1.5, 0.2], [0.4, 1.3], [-1.0, 1.1]]},
    }
    for name, spec in specs.items():
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(spec))
        paths[name] = str(p)
    return paths


def test_parse_grid():
    assert _parse_grid("1:4:4") == [1.0, 2.0, 3.0, 4.0]
    log = _parse_grid("1:4:3:log")
    assert log[0] == pytest.approx(1.0) and log[-1] == pytest.approx(4.0)
    for bad in ("1:4", "a:b:c", "1:4:3:exp", "0:4:3", "4:1:3"):
        with pytest.raises(InputError):
            _parse_grid(bad)


def test_cover_stdout(bodies, capsys):
    rc = run(["cover", "--body", bodies["interval"], "--t", "1.0",
              "--seed", "0", "--budget", "4000"])
    assert rc == 0
    out = capsys.readouterr().out.split()
    assert out == ["5", "5"]


def test_cover_custom_target(bodies, capsys):
    rc = run(["cover", "--body", bodies["ellipse"], "--target",
              bodies["ellipse"], "--t", "1.0", "--seed", "0",
              "--budget", "2000"])
    assert rc == 0
    lo, up = map(int, capsys.readouterr().out.split())
    assert lo == up == 1  # a body covers itself with one translate


def test_staircase_outputs(bodies, tmp_path, capsys):
    out = tmp_path / "stair"
    rc = run(["staircase", "--body", bodies["ellipse"], "--grid", "0.5:2:4",
              "--seed", "3", "--budget", "2000", "--out", str(out)])
    assert rc == 0
    csv_path = out / "staircase_seed3.csv"
    png_path = out / "staircase_seed3.png"
    assert csv_path.exists() and png_path.exists()
    rows = csv_path.read_text().strip().splitlines()
    assert rows[0] == "t,lower_bits,upper_bits,certification,pitch"
    assert len(rows) == 5


def test_staircase_no_plot(bodies, tmp_path):
    out = tmp_path / "np"
    rc = run(["staircase", "--body", bodies["ellipse"], "--grid", "0.5:1:2",
              "--seed", "3", "--budget", "1000", "--out", str(out),
              "--no-plot"])
    assert rc == 0
    assert not (out / "staircase_seed3.png").exists()


def test_duality_outputs(bodies, tmp_path):
    out = tmp_path / "dual"
    rc = run(["duality", "--body", bodies["hexagon"], "--grid", "0.5:1:2",
              "--alpha", "2", "--seed", "0", "--budget", "1500",
              "--out", str(out)])
    assert rc == 0
    files = os.listdir(out)
    assert any(f.endswith(".json") for f in files)
    assert any(f.endswith("_ratios.csv") for f in files)
    assert any(f.endswith(".png") for f in files)
    doc = json.loads((out / [f for f in files if f.endswith(".json")][0])
                     .read_text())
    assert "beta_per_alpha" in doc and "2.0" in doc["beta_per_alpha"]


def test_gamma_stdout(bodies, capsys):
    rc = run(["gamma", "--body", bodies["ellipse"], "--seed", "0",
              "--budget", "4000"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["which"] == "gamma" and doc["value"] >= 1.0
    rc = run(["gamma", "--body", bodies["ellipse"], "--prime", "--seed", "0",
              "--budget", "4000"])
    assert rc == 0
    assert json.loads(capsys.readouterr().out)["which"] == "gamma_prime"


@pytest.mark.parametrize("kind", ["primal", "dual"])
def test_combine_outputs(bodies, tmp_path, kind, capsys):
    out = tmp_path / kind
    rc = run(["combine", "--body", bodies["hexagon"], "--kind", kind,
              "--a", "4", "--b", "1", "--A", "5", "--B", "1.2",
              "--seed", "0", "--budget", "1500", "--out", str(out)])
    assert rc == 0
    doc = json.loads((out / f"combine_{kind}_seed0.json").read_text())
    assert len(doc["points"]) >= 1
    assert doc["separation"] == pytest.approx(0.5)


def test_iterate_outputs(bodies, tmp_path, capsys):
    out = tmp_path / "it"
    rc = run(["iterate", "--body", bodies["ellipse"], "--kind", "primal",
              "--C0", "0.07", "--C2", "0.07", "--R0", "100",
              "--seed", "0", "--budget", "3000", "--out", str(out)])
    assert rc == 0
    txt = capsys.readouterr().out
    assert "consistent" in txt
    files = os.listdir(out)
    doc = json.loads((out / files[0]).read_text())
    assert doc["kind"] == "primal"


def test_iterate_constants_from_config(bodies, tmp_path):
    cfg = tmp_path / "consts.json"
    cfg.write_text(json.dumps({"constants": {"C0": 0.07, "C2": 0.07,
                                             "R0": 100.0}}))
    out = tmp_path / "it2"
    rc = run(["iterate", "--body", bodies["ellipse"], "--kind", "dual",
              "--config", str(cfg), "--seed", "0", "--budget", "3000",
              "--out", str(out)])
    assert rc == 0


def test_iterate_bad_constants_exit1(bodies, tmp_path):
    # The default constants make the sequence contract; exit code 1.
    rc = run(["iterate", "--body", bodies["ellipse"], "--kind", "primal",
              "--seed", "0", "--budget", "2000", "--out", str(tmp_path)])
    assert rc == 1


def test_probe_outputs(tmp_path):
    out = tmp_path / "probe"
    rc = run(["probe", "--family", "hexagon", "--count", "2", "--seed", "3",
              "--budget", "1500", "--out", str(out)])
    assert rc == 0
    files = os.listdir(out)
    assert any(f.endswith(".json") for f in files)
    assert any(f.endswith(".png") for f in files)


def test_error_exit_codes(bodies, tmp_path, capsys):
    assert run(["cover", "--body", str(tmp_path / "missing.json"),
                "--t", "1", "--seed", "0"]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["cover", "--body", str(bad), "--t", "1", "--seed", "0"]) == 1
    assert run(["cover", "--body", bodies["interval"], "--t", "-1",
                "--seed", "0"]) == 1
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"type": "frisbee"}))
    assert run(["cover", "--body", str(wrong), "--t", "1", "--seed", "0"]) == 1
    capsys.readouterr()


def test_seed_required(bodies):
    assert run(["cover", "--body", bodies["interval"], "--t", "1"]) == 1
