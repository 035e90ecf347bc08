import csv
import hashlib
import json
import subprocess
import sys

import pytest

from knapsack_hierarchy.cli import main


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def fg2_file(tmp_path):
    path = tmp_path / "fg2.json"
    assert run("gen", "fg", "--h", 2, "--out", path) == 0
    return path


def test_solve_and_verify_each_kind(fg2_file, tmp_path, capsys):
    for kind, extra, value in [
        ("lp", [], "11/6"),
        ("lp", ["--rank", "rows"], "3/2"),
        ("ip", [], "3/2"),
        ("hierarchy", ["--t", 2], "3/2"),
    ]:
        out = tmp_path / f"{kind}.json"
        assert run("solve", kind, fg2_file, "--out", out, *extra) == 0
        assert capsys.readouterr().out.strip() == value
        assert run("verify", out) == 0
        assert capsys.readouterr().out.startswith("OK")


def test_verify_rejects_tampered_result(fg2_file, tmp_path, capsys):
    out = tmp_path / "h.json"
    run("solve", "hierarchy", fg2_file, "--t", 1, "--out", out)
    data = json.loads(out.read_text())
    data["value"] = "2"
    out.write_text(json.dumps(data))
    assert run("verify", out) == 2
    data["kind"] = "mystery"
    out.write_text(json.dumps(data))
    assert run("verify", out) == 2


def test_input_errors(tmp_path, capsys):
    assert run("gen", "staircase", "--k", 0) == 4
    assert run("solve", "ip", tmp_path / "missing.json") == 4
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run("solve", "ip", bad) == 4
    bad.write_text(json.dumps({"kind": "pip", "A": [["-1"]], "b": ["1"], "w": ["1"]}))
    assert run("solve", "lp", bad) == 4
    with pytest.raises(SystemExit) as err:
        run("solve", "nonsense", bad)
    assert err.value.code == 4


def test_bad_level_is_input_error(fg2_file, capsys):
    assert run("solve", "hierarchy", fg2_file, "--t", 9) == 4
    assert run("report", fg2_file, "--t", "0,7") == 4


def test_budget_exit_code(fg2_file, tmp_path, monkeypatch, capsys):
    out = tmp_path / "h.json"
    monkeypatch.setenv("KH_ITERATION_BUDGET", "1")
    assert run("solve", "hierarchy", fg2_file, "--t", 1, "--out", out) == 3
    # the flag wins over the environment
    assert run("solve", "hierarchy", fg2_file, "--t", 1, "--out", out, "--iteration-budget", 50) == 0
    monkeypatch.setenv("KH_ITERATION_BUDGET", "x")
    assert run("solve", "hierarchy", fg2_file, "--t", 1, "--out", out) == 4


def test_report_csv(fg2_file, tmp_path, capsys):
    out = tmp_path / "gap.csv"
    assert run("report", fg2_file, "--t", "0,1", "--rank", "rows", "--out", out) == 0
    rows = list(csv.DictReader(out.open()))
    assert [(r["t"], r["formulation"], r["value"]) for r in rows] == [
        ("0", "plain", "11/6"), ("0", "rank", "3/2"), ("1", "plain", "3/2"), ("1", "rank", "3/2"),
    ]
    assert rows[0]["gap"] == "11/9"
    assert rows[0]["instance_id"] == "fg2"


def test_color(tmp_path, capsys):
    s7 = tmp_path / "s7.json"
    run("gen", "staircase", "--k", 7, "--out", s7)
    out = tmp_path / "c.json"
    assert run("color", s7, "--edges", "1,4", "--out", out) == 0
    assert "3 classes" in capsys.readouterr().out
    assert run("verify", out) == 0
    data = json.loads(out.read_text())
    data["classes"][0], data["classes"][2] = data["classes"][2], data["classes"][0]
    data["classes"][2] = data["classes"][2] + data["classes"][1]
    data["classes"].pop(1)
    out.write_text(json.dumps(data))
    assert run("verify", out) == 2
    assert run("color", s7, "--edges", "99") == 4


def test_check_lemmas(capsys):
    assert run("check-lemmas", "--h", 2, "--k", 4, "--t", "1,2") == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert "fg-layer-profit l=2" in out


def _digest(args, cwd):
    subprocess.run([sys.executable, "-m", "knapsack_hierarchy.cli", *args], cwd=cwd, check=True,
                   capture_output=True)
    return hashlib.sha256((cwd / "out.json").read_bytes()).hexdigest()


def test_runs_are_reproducible(tmp_path):
    run("gen", "staircase", "--k", 5, "--out", tmp_path / "s5.json")
    args = ["solve", "hierarchy", "s5.json", "--t", "2", "--out", "out.json"]
    first = _digest(args, tmp_path)
    assert _digest(args, tmp_path) == first
    assert _digest(args + ["--jobs", "2"], tmp_path) == first
