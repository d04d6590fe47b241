import csv
import json
from pathlib import Path

import pytest

from canard.cli import main, parse_grid, parse_pair
from canard.errors import ConfigError

SYSTEMS = Path(__file__).resolve().parent.parent / "systems"


def read_json(path):
    return json.loads(Path(path).read_text())


def test_parse_helpers():
    assert [float(v) for v in parse_grid("0:1:3")] == [0.0, 0.5, 1.0]
    assert [float(v) for v in parse_pair("1e-5:1e-3")] == [1e-5, 1e-3]
    for bad in ("0:1", "0:1:0", "a:b:c"):
        with pytest.raises(ConfigError):
            parse_grid(bad)


def test_classify(tmp_path, capsys):
    assert main(["classify", "--x", "0", "--out", str(tmp_path)]) == 0
    assert "VI3 conditions: pass" in capsys.readouterr().out
    assert read_json(tmp_path / "classify.json")["kind"] == "tangency"


def test_audit_pass_and_constants(tmp_path):
    assert main(["audit", "--out", str(tmp_path)]) == 0
    data = read_json(tmp_path / "audit.json")
    assert data["B"].startswith("2")
    assert read_json(tmp_path / "manifest.json")["checks"]["audit_passed"] is True


def test_audit_failure_still_writes_report(tmp_path):
    weak = json.loads((SYSTEMS / "two_fold_quadratic_linear.json").read_text())
    # a lower fold slope below the upper one breaks the two-fold type
    weak["zminus"]["Y"] = [{"coeff": "0", "lam_coeff": "1/2", "x": 0, "y": 0},
                           {"coeff": "-1/2", "lam_coeff": "0", "x": 1, "y": 0}]
    path = tmp_path / "weak.json"
    path.write_text(json.dumps(weak))
    out = tmp_path / "out"
    assert main(["audit", "--system", str(path), "--out", str(out)]) == 4
    assert read_json(out / "manifest.json")["checks"]["audit_passed"] is False
    assert read_json(out / "audit.json")


def test_sdi_table(tmp_path):
    assert main(["sdi", "--grid", "0:0.2:3", "--method", "series", "--precision", "40",
                 "--out", str(tmp_path)]) == 0
    rows = list(csv.reader((tmp_path / "sdi.csv").open()))
    assert rows[0] == ["x", "I"] and len(rows) == 4
    coeffs = read_json(tmp_path / "sdi_series.json")["coefficients"]
    assert coeffs[3].startswith("1.77101234")


def test_synth_writes_bundle_and_golden_check(tmp_path, capsys):
    assert main(["synth", "--k", "4", "--delta", "1e-3", "--out", str(tmp_path)]) == 0
    assert "reference coefficients: pass" in capsys.readouterr().out
    for name in ("synth.json", "psi_coefficients.csv", "roots.csv", "manifest.json"):
        assert (tmp_path / name).exists()
    manifest = read_json(tmp_path / "manifest.json")
    assert manifest["checks"]["golden_check"] is True
    assert manifest["checks"]["simple_roots"] == 3
    assert len(list(csv.reader((tmp_path / "roots.csv").open()))) == 4


def test_synth_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["synth", "--k", "3", "--delta", "1e-3", "--precision", "50"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    for f in a.iterdir():
        assert f.read_bytes() == (b / f.name).read_bytes()


def test_synth_failure_leaves_no_partial_output(tmp_path):
    out = tmp_path / "out"
    assert main(["synth", "--k", "4", "--delta", "0.1", "--precision", "50", "--out", str(out)]) == 3
    assert not out.exists() or not any(out.iterdir())


def test_upsilon_too_large_is_an_audit_failure(tmp_path):
    assert main(["synth", "--k", "8", "--delta", "1e-5", "--upsilon", "0.6", "--precision", "60",
                 "--out", str(tmp_path / "o")]) == 4


def test_plotdata_from_synth(tmp_path):
    src = tmp_path / "synth"
    assert main(["synth", "--k", "3", "--delta", "1e-3", "--precision", "50", "--out", str(src)]) == 0
    dst = tmp_path / "plots"
    assert main(["plotdata", "--from", str(src), "--points", "21", "--precision", "50", "--out", str(dst)]) == 0
    for name in ("phi_k.csv", "phi_k_zoom.csv", "I2.csv"):
        rows = list(csv.reader((dst / name).open()))
        assert len(rows) == 22


def test_plotdata_without_synth_result(tmp_path):
    out = tmp_path / "plots"
    assert main(["plotdata", "--from", str(tmp_path), "--out", str(out)]) == 2
    assert not out.exists() or not any(out.iterdir())


def test_tune_delta_without_transition(tmp_path):
    assert main(["tune-delta", "--k", "4", "--bracket", "1e-4:1e-2", "--precision", "50",
                 "--out", str(tmp_path)]) == 3


def test_simulate(tmp_path):
    assert main(["simulate", "--epsilon", "0.1", "--x0", "-0.3", "--y0", "0.001", "--tmax", "10",
                 "--out", str(tmp_path)]) == 0
    rows = list(csv.reader((tmp_path / "trajectory.csv").open()))
    assert len(rows) > 2


def test_diffmap_and_epsilon_floor(tmp_path):
    assert main(["diffmap", "--epsilon", "0.1", "--grid=-0.2:-0.1:2", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "diffmap.csv").exists()
    assert main(["diffmap", "--epsilon", "0.005", "--grid=-0.2:-0.1:2"]) == 2


def test_cycles_on_attracting_system(tmp_path):
    code = main(["cycles", "--system", str(SYSTEMS / "two_fold_attracting.json"), "--epsilon", "0.1",
                 "--lambda", "0.0020588849706026154", "--grid=-0.04:-0.03:2", "--out", str(tmp_path)])
    assert code == 0
    data = read_json(tmp_path / "cycles.json")
    assert data["cycles"] and data["cycles"][0]["stable"]


@pytest.mark.parametrize("argv, code", [
    (["classify", "--x", "5"], 2),
    (["audit", "--system", "/nonexistent.json"], 2),
    (["synth", "--k", "1", "--delta", "1e-3"], 2),
    (["sdi", "--precision", "5"], 2),
])
def test_exit_codes(argv, code):
    assert main(argv) == code
