"""End-to-end command line runs, in process via main(argv)."""

import json
import math

import numpy as np
import pytest

from conformal2d import Bubble, RadialField, RadialProfile, Vec2, minimize_on_circles
from conformal2d.cli import main

SCHEMA_KEYS = {"schema", "command", "seed", "config", "checks", "passed",
               "environment", "metadata"}


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_verify_single_suite_stdout(capsys):
    code, payload = run_json(capsys, ["verify", "--suite", "counterexample"])
    assert code == 0
    assert SCHEMA_KEYS <= set(payload)
    assert payload["schema"] == "conformal2d/1"
    assert payload["command"] == "verify"
    assert payload["passed"] is True
    assert payload["checks"]
    for row in payload["checks"]:
        assert row["passed"], row["name"]
    env = payload["environment"]
    assert {"package", "python", "numpy", "scipy"} <= set(env)


def test_verify_out_file_and_witness_csvs(tmp_path, capsys):
    out = tmp_path / "trace.json"
    csvdir = tmp_path / "witness"
    code = main(["verify", "--suite", "trace", "--out", str(out),
                 "--csv-dir", str(csvdir)])
    text = capsys.readouterr().out
    assert code == 0
    # with --out the JSON goes to the file and stdout gets the summary
    assert "passed" in text and "[PASS]" in text
    payload = json.loads(out.read_text())
    assert payload["passed"] is True
    written = list(csvdir.glob("check-*.csv"))
    assert written, "expected witness csv files"
    header = written[0].read_text().splitlines()[0]
    assert header == "label,error"


def test_verify_is_deterministic_modulo_timestamp(capsys):
    runs = []
    for _ in range(2):
        code, payload = run_json(capsys, ["verify", "--suite", "liouville",
                                          "--seed", "11"])
        assert code == 0
        payload.pop("metadata")
        runs.append(json.dumps(payload, sort_keys=True))
    assert runs[0] == runs[1]


def test_verify_unknown_suite_is_config_error(capsys):
    assert main(["verify", "--suite", "nonsense"]) == 2


def test_verify_comma_separated_suites(capsys):
    code, payload = run_json(capsys, ["verify", "--suite", "counterexample,cross"])
    assert code == 0
    names = {row["name"] for row in payload["checks"]}
    assert any(n.startswith("counterexample") for n in names)
    assert any("spectrum" in n or "cross" in n for n in names)


def test_envelope_demo_grid(capsys):
    code, payload = run_json(capsys, ["envelope", "--eps", "0.5", "--eps", "1.0"])
    assert code == 0
    names = [row["name"] for row in payload["checks"]]
    assert "envelope-semiconcavity[eps=0.5]" in names
    assert "envelope-below-input[eps=1]" in names
    assert payload["passed"] is True


def test_envelope_profile_csv_and_outputs(tmp_path, capsys):
    grid = np.linspace(0.0, 6.0, 601)
    RadialProfile(grid, np.abs(grid - 2.0)).to_csv(tmp_path / "kink.csv")
    csvdir = tmp_path / "env"
    code, payload = run_json(capsys, [
        "envelope", "--profile", str(tmp_path / "kink.csv"),
        "--eps", "0.8", "--csv-dir", str(csvdir)])
    assert code == 0
    env_csv = csvdir / "envelope-eps0.8.csv"
    assert env_csv.exists()
    q = RadialProfile.from_csv(env_csv)
    x = np.abs(q.r - 2.0)
    huber = np.where(x <= 0.4, x * x / 0.8, x - 0.2)
    inner = (q.r > 0.5) & (q.r < 5.5)
    step = grid[1] - grid[0]
    assert np.abs(q.v - huber)[inner].max() < 4.0 * step * step


def test_envelope_rejects_bad_eps(capsys):
    assert main(["envelope", "--eps", "-1"]) == 2


def test_solve_radial_sigma2_csv_round_trip(tmp_path, capsys):
    csvdir = tmp_path / "solve"
    code, payload = run_json(capsys, [
        "solve-radial", "--f", "sigma2", "--grid", "0:5:1000",
        "--csv-dir", str(csvdir)])
    assert code == 0
    assert payload["passed"] is True
    check = payload["checks"][0]
    assert check["name"] == "solve-residual[sigma2]"
    assert check["extras"]["mu"] == pytest.approx(1.0, abs=1e-12)
    assert check["extras"]["cone_exit"] is None

    path = csvdir / "solve-sigma2.csv"
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "r,v,dv,lambda1,lambda2,residual"
    assert len(lines) == 1001

    # rebuild a field from the csv columns and close the loop through the
    # circle-minimum reduction: it must reproduce the solved profile
    rows = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    field = RadialField(RadialProfile(rows[:, 0], rows[:, 1], dv=rows[:, 2]))
    prof = minimize_on_circles(field, (0.0, 0.0), rows[::100, 0])
    bubble = Bubble(4.0, 32.0)
    for r, v in zip(prof.r, prof.v):
        assert v == pytest.approx(bubble.radial_value(float(r)), abs=1e-6)


def test_solve_radial_grid_must_start_at_zero(capsys):
    assert main(["solve-radial", "--grid", "1:5:100"]) == 2


def test_solve_radial_rejects_sigma2_on_wide_cone(capsys):
    assert main(["solve-radial", "--f", "sigma2", "--cone", "1.2"]) == 2


def test_moving_spheres_default_field(tmp_path, capsys):
    csvdir = tmp_path / "ms"
    code, payload = run_json(capsys, [
        "moving-spheres", "--x", "0,0", "--csv-dir", str(csvdir)])
    assert code == 0
    rep = payload["report"]
    assert rep["unbounded"] is False
    assert rep["lambda_bar"] == pytest.approx(1.0, abs=2e-3)
    assert rep["equality_residual"] < 1e-8
    curve = (csvdir / "slack-curve.csv").read_text().strip().splitlines()
    assert curve[0] == "lambda,min_slack,max_abs_slack"
    assert len(curve) == 18


def test_moving_spheres_inline_field_json(capsys):
    spec = json.dumps({"family": "bubble", "a": 1.0, "b": 2.0})
    code, payload = run_json(capsys, ["moving-spheres", "--field", spec])
    assert code == 0
    assert payload["report"]["lambda_bar"] == pytest.approx(0.5, abs=2e-3)


def test_moving_spheres_missing_field_file(capsys):
    assert main(["moving-spheres", "--field", "/nonexistent/f.json"]) == 3


def test_moving_spheres_bad_point(capsys):
    assert main(["moving-spheres", "--x", "1;2"]) == 2


def test_report_merges_runs(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["verify", "--suite", "counterexample", "--out", str(a)]) == 0
    assert main(["envelope", "--eps", "1.0", "--out", str(b)]) == 0
    capsys.readouterr()
    code = main(["report", str(a), str(b), "--out", str(tmp_path / "m.json")])
    assert code == 0
    merged = json.loads((tmp_path / "m.json").read_text())
    n_a = len(json.loads(a.read_text())["checks"])
    n_b = len(json.loads(b.read_text())["checks"])
    assert len(merged["checks"]) == n_a + n_b


def test_report_propagates_failures(tmp_path, capsys):
    doc = {
        "schema": "conformal2d/1",
        "checks": [{"name": "broken", "points_tested": 1, "max_error": 1.0,
                    "tolerance": 1e-9, "passed": False}],
    }
    path = tmp_path / "fail.json"
    path.write_text(json.dumps(doc))
    assert main(["report", str(path)]) == 1


def test_report_respects_checkless_verdict(tmp_path, capsys):
    # experiment payloads carry passed but no check rows; the merge
    # must not launder their failure into a clean report
    doc = {"schema": "conformal2d/1", "checks": [], "passed": False}
    path = tmp_path / "experiment.json"
    path.write_text(json.dumps(doc))
    out = tmp_path / "m.json"
    assert main(["report", str(path), "--out", str(out)]) == 1
    assert json.loads(out.read_text())["passed"] is False


def test_report_rejects_wrong_schema(tmp_path, capsys):
    path = tmp_path / "alien.json"
    path.write_text(json.dumps({"schema": "other/9", "checks": []}))
    assert main(["report", str(path)]) == 2
    assert main(["report"]) == 2
