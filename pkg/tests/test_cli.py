import csv
import json

import numpy as np
import pytest

from cpmaps import cli, scenarios, serialize


def _run(args, capsys):
    code = cli.run(args)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("case", scenarios.NAMED_CASES)
def test_verify_named_cases(case, capsys):
    code, out, _ = _run(["verify", "--case", case], capsys)
    report = json.loads(out)
    assert code == 0 and report["pass"]
    assert all(c["pass"] for c in report["checks"])


def test_verify_reports_failure_with_exit_one(capsys):
    code, out, _ = _run(["verify", "--case", "figure", "--tol", "1e-30"], capsys)
    assert code == 1 and not json.loads(out)["pass"]


def test_verify_from_scenario_file(tmp_path, capsys):
    path = tmp_path / "sc.json"
    sc = scenarios.named_case("discordant-uniform")
    serialize.write_json(serialize.scenario_to_json(sc.spec, seed=5), path)
    code, out, _ = _run(["verify", "--scenario", str(path), "--t", "0.8"], capsys)
    assert code == 0
    assert json.loads(out)["class"] == "II"


def test_choi_output(tmp_path, capsys):
    out = tmp_path / "choi.json"
    assert cli.run(["choi", "--case", "figure", "--map", "phi1", "--t", "0.3", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    choi = serialize.decode_matrix(doc["choi_input_first"])
    assert choi.shape == (4, 4)
    assert np.trace(choi).real == pytest.approx(2.0)
    assert doc["cp_report"]["is_cp"]


def test_choi_output_is_byte_stable(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        cli.run(["choi", "--case", "discordant-uniform", "--t", "1.0", "--out", str(path)])
    assert a.read_bytes() == b.read_bytes()


def test_sweep_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    assert cli.run(["sweep", "--case", "figure", "--t-max", "3", "--steps", "7", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 7 and tuple(rows[0]) == cli.SWEEP_HEADER
    assert max(float(r["dist_domain"]) for r in rows) < 1e-10


def test_bloch_csv(tmp_path):
    out = tmp_path / "bloch.csv"
    assert cli.run(["bloch", "--case", "cesar", "--samples", "12", "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == list(cli.BLOCH_HEADER) and len(rows) == 13
    for r in rows[1:]:
        assert np.linalg.norm([float(x) for x in r[3:]]) <= 1 + 1e-12


def test_reproduce_writes_report(tmp_path):
    out = tmp_path / "repro"
    assert cli.run(["reproduce", "--case", "figure", "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["pass"]
    assert (out / "choi_jpa_t2_analytic.json").exists()
    assert (out / "bloch_phi2_t4.csv").exists()
    assert cli.run(["reproduce", "--case", "discordant-uniform", "--out", str(tmp_path / "d")]) == 0


@pytest.mark.parametrize("args", [
    ["choi", "--case", "nope"],
    ["sweep", "--case", "figure", "--t-max", "-1"],
    ["sweep", "--case", "figure", "--t-max", "1", "--steps", "1"],
    ["sweep", "--case", "discordant-uniform", "--t-max", "1"],
    ["bloch", "--case", "discordant-uniform"],
    ["choi", "--case", "figure", "--map", "phiII"],
    ["choi", "--case", "discordant-uniform", "--map", "phi1"],
    ["verify", "--case", "figure", "--steps", "0"],
    ["verify", "--case", "figure", "--tol", "-1"],
    ["verify", "--scenario", "/nonexistent/file.json"],
    ["reproduce", "--scenario", "x.json"],
])
def test_input_errors_exit_two(args, capsys):
    code, _, err = _run(args, capsys)
    assert code == 2 and err.startswith("error:")


def test_bad_json_exit_two(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("[1, 2")
    code, _, err = _run(["verify", "--scenario", str(path)], capsys)
    assert code == 2 and "invalid JSON" in err


def test_argparse_requires_source():
    with pytest.raises(SystemExit) as exc:
        cli.run(["verify"])
    assert exc.value.code == 2
