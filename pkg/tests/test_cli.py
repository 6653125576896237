import csv
import io
import json

import pytest

from seqscan.cli import main, parse_grid
from seqscan.errors import ConfigError

FIG1 = ["--p0", "0.2", "--p1", "0.8", "--alpha", "0.1", "--beta", "0.1", "--a", "0.1", "--b", "0.1"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_maxobs(capsys):
    code, out, _ = run(capsys, "maxobs", "--p0", "0.2", "--p1", "0.8", "--zeta", "1", "--a", "0.1", "--b", "0.1")
    assert code == 0 and "n_max = 11" in out


def test_detect_empty_input(capsys, tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    code, out, err = run(capsys, "detect", *FIG1, "--input", str(path))
    assert code == 0 and out == "" and err == ""


def test_detect_replay_is_byte_identical(capsys, tmp_path):
    path = tmp_path / "ev.jsonl"
    lines = [{"timestamp": i, "src": f"s{i % 3}", "dst": f"d{i // 2}", "outcome": (i // 3) % 2} for i in range(40)]
    path.write_text("".join(json.dumps(x) + "\n" for x in lines) + "garbage\n")
    first = run(capsys, "detect", *FIG1, "--input", str(path))
    second = run(capsys, "detect", *FIG1, "--input", str(path))
    assert first == second and first[0] == 0
    assert json.loads(first[2])["error"] == "malformed-jsonl"
    strict = run(capsys, "detect", *FIG1, "--input", str(path), "--strict")
    assert strict[0] != 0


def test_detect_snapshot_resume(capsys, tmp_path):
    ev = [{"timestamp": 1, "src": "a", "dst": "x", "outcome": 0},
          {"timestamp": 2, "src": "a", "dst": "y", "outcome": 0}]
    p1, p2, snap = tmp_path / "1.jsonl", tmp_path / "2.jsonl", tmp_path / "snap.json"
    p1.write_text(json.dumps(ev[0]) + "\n")
    p2.write_text(json.dumps(ev[1]) + "\n")
    run(capsys, "detect", *FIG1, "--input", str(p1), "--snapshot", str(snap), "--no-summary")
    _, out, _ = run(capsys, "detect", *FIG1, "--input", str(p2), "--snapshot", str(snap))
    assert json.loads(out.splitlines()[0])["decision"] == "scanner"


def test_boundaries(capsys):
    _, out, _ = run(capsys, "boundaries", *FIG1)
    assert out.splitlines()[2] == "2,0,2"
    _, out, _ = run(capsys, "boundaries", "--detector", "trwa", *FIG1[:8], "--horizon", "5")
    assert out.splitlines()[0] == "n,s_scanner,s_benign" and len(out.splitlines()) == 6


def test_evaluate_reference_config(capsys, tmp_path):
    path = tmp_path / "c.ini"
    path.write_text("[spec]\np0 = 0.1\np1 = 0.15\nalpha = 0.1\nbeta = 0.1\n"
                    "[params]\na = 0.0584151351108776\nb = 0.045599436759948736\n")
    code, out, _ = run(capsys, "evaluate", "--config", str(path), "--pgrid", "0.1:0.15:0.05")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [r["zone"] for r in rows] == ["H0", "H1"]
    assert all(float(r["risk"]) <= 0.1 for r in rows)
    assert "asn_ratio" in rows[0]


def test_simulate_json(capsys):
    _, out, _ = run(capsys, "simulate", *FIG1, "--p", "0.5", "--runs", "2000", "--seed", "3")
    doc = json.loads(out)
    assert doc["runs"] == 2000 and doc["seed"] == 3


def test_tune_small(capsys):
    code, out, _ = run(capsys, "tune", "--p0", "0.2", "--p1", "0.8", "--alpha", "0.1", "--beta", "0.1", "--kmax", "2")
    assert code == 0 and "k,a,b,zeta_star,A,B,Q" in out


def test_errors_are_json(capsys, tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text("[spec]\nwhat = 1\n")
    code, _, err = run(capsys, "evaluate", "--config", str(bad))
    assert code == 2 and json.loads(err)["error"] == "invalid-config"
    code, _, err = run(capsys, "maxobs", "--p0", "0.8", "--p1", "0.2", "--a", "0.1", "--b", "0.1")
    assert code == 2 and "error" in json.loads(err)


def test_parse_grid():
    assert parse_grid("0.1:0.3:0.1") == [0.1, 0.2, 0.3]
    with pytest.raises(ConfigError):
        parse_grid("0:1:0.5")
