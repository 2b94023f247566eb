import json
import subprocess
import sys

import pytest

from qspreads.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bounds_table(capsys):
    code, out, _ = run_cli(capsys, "bounds", "--n", "4", "--k", "2", "--q", "2")
    assert code == 0
    assert "7/5" in out and "336/239" in out
    assert "upper" in out and "cor34" in out and "thm33" in out


def test_bounds_json(capsys):
    code, out, _ = run_cli(capsys, "bounds", "--n", "6", "--k", "3", "--q", "2",
                           "--json")
    assert code == 0
    rows = {r["formula_id"]: r for r in json.loads(out)}
    assert rows["upper"]["numerator"] == "155"
    assert rows["cor34"]["integer_bound"] == "18"


def test_bounds_exact_union(capsys):
    code, out, _ = run_cli(capsys, "bounds", "--n", "4", "--k", "2", "--q", "2",
                           "--exact-union", "--json")
    assert code == 0
    rows = {r["formula_id"]: r for r in json.loads(out)}
    assert rows["thm31"]["numerator"] == "28"  # 20160/9360 reduced
    assert rows["thm31"]["denominator"] == "13"


def test_bounds_usage_error(capsys):
    code, _, err = run_cli(capsys, "bounds", "--n", "5", "--k", "2", "--q", "2")
    assert code == 1
    assert "divide" in err


def test_bounds_requires_prime_power(capsys):
    code, _, err = run_cli(capsys, "bounds", "--n", "4", "--k", "2", "--q", "6")
    assert code == 1


def test_construct_and_certify_roundtrip(capsys, tmp_path):
    out_path = tmp_path / "p.json"
    code, out, _ = run_cli(capsys, "construct", "--n", "4", "--k", "2",
                           "--q", "2", "--mode", "exhaustive",
                           "--out", str(out_path))
    assert code == 0
    assert "full parallelism" in out
    code, out, _ = run_cli(capsys, "certify", str(out_path))
    assert code == 0
    assert "certificate ok" in out


def test_construct_reports_budget(capsys, tmp_path):
    code, _, err = run_cli(capsys, "construct", "--n", "6", "--k", "2",
                           "--q", "2", "--mode", "exhaustive",
                           "--out", str(tmp_path / "x.json"))
    assert code == 2
    assert "infeasible" in err


def test_construct_random_reproducible(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        code, _, _ = run_cli(capsys, "construct", "--n", "4", "--k", "2",
                             "--q", "2", "--mode", "random", "--seed", "7",
                             "--limit", "500", "--out", str(path))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_construct_manifest_reproduces_run(capsys, tmp_path):
    first = tmp_path / "first.json"
    code, _, _ = run_cli(capsys, "construct", "--n", "4", "--k", "2", "--q", "2",
                         "--mode", "random", "--seed", "42", "--limit", "300",
                         "--out", str(first))
    assert code == 0
    cmd = json.loads(first.read_text())["manifest"]["command"]
    again = tmp_path / "again.json"
    code, _, _ = run_cli(capsys, "construct",
                         "--n", str(cmd["n"]), "--k", str(cmd["k"]),
                         "--p", str(cmd["p"]), "--e", str(cmd["e"]),
                         "--mode", cmd["mode"], "--seed", cmd["seed"],
                         "--limit", cmd["limit"], "--out", str(again))
    assert code == 0
    assert first.read_bytes() == again.read_bytes()


def test_certify_rejects_corrupted_byte(capsys, tmp_path):
    path = tmp_path / "p.json"
    run_cli(capsys, "construct", "--n", "4", "--k", "2", "--q", "2",
            "--out", str(path))
    data = bytearray(path.read_bytes())
    data[len(data) // 2] ^= 0x01
    mut = tmp_path / "mut.json"
    mut.write_bytes(data)
    code, out, _ = run_cli(capsys, "certify", str(mut))
    assert code == 3
    assert "INVALID" in out


def test_verify_claim_lemma24(capsys):
    code, out, _ = run_cli(capsys, "verify", "--claim", "lemma24",
                           "--n", "4", "--k", "2", "--q", "2")
    assert code == 0
    assert "formula 576 enumerated 576" in out


def test_verify_claim_thm32_union(capsys):
    code, out, _ = run_cli(capsys, "verify", "--claim", "thm32-union",
                           "--n", "4", "--k", "2", "--q", "2", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload[0]["match"] is True
    assert payload[1]["L"] == payload[1]["union_enumerated"]


def test_verify_needs_suite_or_claim(capsys):
    code, _, err = run_cli(capsys, "verify", "--n", "4", "--k", "2", "--q", "2")
    assert code == 1


def test_unknown_flag_is_usage_error(capsys):
    assert main(["bounds", "--wat"]) == 1


def test_console_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "qspreads.cli", "--version"],
        capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.strip() == "0.1.0"
