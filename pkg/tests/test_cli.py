import json
import subprocess
import sys
from pathlib import Path

import pytest

from threshold_lab.cli import main
from threshold_lab.formula import read_dimacs

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_prints_class_and_stats(capsys):
    code, out, _ = run(capsys, "classify", "--constraints", CONFIGS / "2sat.cset")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "Sharp"
    assert "delta_k\t3" in lines and "a0\t2" in lines
    code, out, _ = run(capsys, "classify", "--constraints", CONFIGS / "coarse_npc.cset")
    assert out.splitlines()[:2] == ["Coarse", "schaefer: NPComplete"]


def test_classify_json_record(tmp_path, capsys):
    out = tmp_path / "c.json"
    assert run(capsys, "classify", "--constraints", CONFIGS / "horn2.cset", "--out", out, "--seed", 3)[0] == 0
    rec = json.loads(out.read_text())
    assert rec["threshold_class"] == "Coarse" and rec["corollary_cases"] == ["HornCase"]
    assert rec["config"]["seed"] == 3 and rec["version"].startswith("0.1.0")


def test_generate_empty_formula(tmp_path, capsys):
    out = tmp_path / "f.cnf"
    code, _, _ = run(capsys, "generate", "--constraints", CONFIGS / "horn2.cset", "--n", 10, "--m", 0,
                     "--seed", 1, "--out", out)
    assert code == 0
    assert "p cnf 10 0" in out.read_text().splitlines()
    assert read_dimacs(out).m == 0


def test_generate_then_solve_and_trace(tmp_path, capsys):
    cnf = tmp_path / "f.cnf"
    run(capsys, "generate", "--constraints", CONFIGS / "horn2.cset", "--n", 20, "--m", 40, "--seed", 5, "--out", cnf)
    assert read_dimacs(cnf).m == 40
    results = {}
    for decider in ("oracle", "cdcl", "pur"):
        code, out, _ = run(capsys, "solve", "--input", cnf, "--decider", decider, "--seed", 1)
        assert code == 0
        results[decider] = out.strip().splitlines()[-1].split(",")[1]
    assert results["oracle"] == results["cdcl"]
    assert (results["pur"] == "Accept") == (results["oracle"] == "SAT")
    code, out, _ = run(capsys, "pur-trace", "--input", cnf, "--seed", 1)
    assert code == 0 and "t,i,P_i,N_i" in out


def test_qempty_example(capsys):
    code, out, _ = run(capsys, "qempty", "--rate", "const:2", "--trials", 100000, "--horizon", 10000, "--seed", 7)
    assert code == 0
    header, row = out.strip().splitlines()[1:]
    rec = dict(zip(header.split(","), row.split(",")))
    assert abs(float(rec["estimate"]) - 0.2032) < 0.01
    assert float(rec["ci_low"]) <= 0.2031878699 <= float(rec["ci_high"])


def test_every_bad_field_gets_a_line(capsys):
    code, out, err = run(capsys, "width", "--constraints", "missing.cset", "--n", 0, "--epsilon", 0.7,
                         "--format", "xml", "--trials", "many")
    assert code == 2 and out == ""
    lines = err.strip().splitlines()
    for flag in ("--constraints", "--n", "--epsilon", "--format", "--trials"):
        assert sum(flag + ":" in line for line in lines) == 1, flag
    code, _, err = run(capsys, "case-check", "--constraints", CONFIGS / "horn2.cset")
    assert code == 2 and "--case: required" in err and "--c: required" in err and "--n: required" in err


def test_missing_seed_is_generated_and_recorded(tmp_path, capsys):
    out = tmp_path / "q.json"
    run(capsys, "qempty", "--rate", "const:1.5", "--trials", 100, "--horizon", 50, "--out", out)
    seed = json.loads(out.read_text())["config"]["seed"]
    assert isinstance(seed, int) and 0 <= seed < 2**64
    again = tmp_path / "q2.json"
    run(capsys, "qempty", "--rate", "const:1.5", "--trials", 100, "--horizon", 50, "--seed", seed, "--out", again)
    a, b = json.loads(out.read_text()), json.loads(again.read_text())
    assert a["results"] == b["results"]


def test_outputs_identical_across_reruns_and_jobs(tmp_path, capsys):
    outs = []
    path = tmp_path / "curve.csv"
    for jobs in (1, 1, 3):
        code, _, _ = run(capsys, "curve", "--constraints", CONFIGS / "3sat.cset", "--n", 10,
                         "--controls", "0.01,0.03", "--trials", 120, "--seed", 99, "--jobs", jobs, "--out", path)
        assert code == 0
        outs.append(path.read_text())
        assert json.loads((tmp_path / "curve.csv.run.json").read_text())["seed"] == 99
    assert outs[0] == outs[1]
    strip = [o.replace('"jobs": 3', '"jobs": 1') for o in outs]
    assert strip[0] == strip[2]
    assert "\r" not in outs[0]


def test_io_failure_is_nonzero(tmp_path, capsys):
    code, _, err = run(capsys, "qempty", "--rate", "const:2", "--trials", 10, "--horizon", 10, "--seed", 1,
                       "--out", tmp_path / "no" / "such" / "dir.csv")
    assert code == 1 and "error" in err


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "threshold_lab.cli", "classify", "--constraints",
                           str(CONFIGS / "trivial.cset")], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("Trivial")
