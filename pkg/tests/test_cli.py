import csv
import io
import subprocess
import sys

import pytest

from sdpsat.cli import main
from sdpsat.generate import random_instance
from sdpsat.instance import evaluate, parse_dimacs
from sdpsat.oracle import brute_force

TRIANGLE = "p cnf 2 3\n1 2 0\n-1 2 0\n-2 0\n"


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_solve_triangle_complete(tmp_path, capsys):
    path = tmp_path / "tri.cnf"
    path.write_text(TRIANGLE)
    code, out, err = run_cli(["solve", str(path), "--seed", "0"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert "o 1" in lines
    assert "s OPTIMUM FOUND" in lines
    v_lines = [l for l in lines if l.startswith("v ")]
    assert len(v_lines) == 1
    lits = [int(t) for t in v_lines[0].split()[1:]]
    assert len(lits) == 2
    values = [0, 0, 0]
    for lit in lits:
        values[abs(lit)] = 1 if lit > 0 else -1
    inst = parse_dimacs(TRIANGLE)
    assert evaluate(inst, values) == 1
    assert "stats nodes_popped" in err


def test_solve_satisfiable(tmp_path, capsys):
    path = tmp_path / "sat.cnf"
    path.write_text("p cnf 3 2\n1 2 0\n-1 3 0\n")
    code, out, _ = run_cli(["solve", str(path)], capsys)
    assert code == 0
    lines = out.splitlines()
    assert "o 0" in lines
    assert "s OPTIMUM FOUND" in lines


def test_solve_missing_file(capsys):
    code, out, err = run_cli(["solve", "/nonexistent/file.cnf"], capsys)
    assert code == 2
    assert out == ""


def test_solve_parse_error(tmp_path, capsys):
    path = tmp_path / "bad.cnf"
    path.write_text("p cnf 1 1\n7 0\n")
    code, _, err = run_cli(["solve", str(path)], capsys)
    assert code == 2
    assert "parse error" in err


def test_solve_timeout_reports_unknown(tmp_path, capsys):
    from sdpsat.generate import random_clauses, render_dimacs
    import numpy as np
    path = tmp_path / "big.cnf"
    clauses = random_clauses(150, 700, 2, np.random.default_rng(0))
    path.write_text(render_dimacs(150, clauses))
    code, out, _ = run_cli(
        ["solve", str(path), "--timeout", "0.3", "--seed", "1"], capsys)
    lines = out.splitlines()
    assert "s UNKNOWN" in lines
    o_lines = [l for l in lines if l.startswith("o ")]
    if o_lines:
        assert code == 0
        values = [int(l.split()[1]) for l in o_lines]
        assert values == sorted(values, reverse=True)


def test_solve_incomplete_mode(tmp_path, capsys):
    path = tmp_path / "tri.cnf"
    path.write_text(TRIANGLE)
    code, out, _ = run_cli(
        ["solve", str(path), "--mode", "incomplete", "--seed", "2"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert "o 1" in lines
    assert "s UNKNOWN" in lines  # incomplete mode never claims a proof


def test_generate_roundtrip(tmp_path, capsys):
    out_file = tmp_path / "gen.cnf"
    code, _, _ = run_cli(["generate", "--n", "4", "--m", "2", "--length", "2",
                          "--seed", "3", "-o", str(out_file)], capsys)
    assert code == 0
    inst = parse_dimacs(out_file.read_text())
    assert inst.num_vars == 4
    assert inst.num_clauses == 2
    for cl in inst.clauses:
        assert cl.length == 2
        assert len({abs(l) for l in cl.lits}) == 2


def test_generate_deterministic(capsys):
    code, out1, _ = run_cli(["generate", "--n", "10", "--m", "20",
                             "--length", "3", "--seed", "9"], capsys)
    code, out2, _ = run_cli(["generate", "--n", "10", "--m", "20",
                             "--length", "3", "--seed", "9"], capsys)
    assert out1 == out2
    inst = parse_dimacs(out1)
    assert all(cl.length == 3 for cl in inst.clauses)


def test_generate_length_exceeds_n(capsys):
    code, _, _ = run_cli(["generate", "--n", "2", "--m", "1",
                          "--length", "3", "--seed", "0"], capsys)
    assert code == 2


def test_seed_env_var_flag_wins(tmp_path, capsys, monkeypatch):
    path = tmp_path / "tri.cnf"
    path.write_text(TRIANGLE)
    monkeypatch.setenv("SDPSAT_SEED", "123")
    _, out_env, _ = run_cli(["generate", "--n", "6", "--m", "6"], capsys)
    monkeypatch.delenv("SDPSAT_SEED")
    _, out_123, _ = run_cli(["generate", "--n", "6", "--m", "6",
                             "--seed", "123"], capsys)
    _, out_0, _ = run_cli(["generate", "--n", "6", "--m", "6",
                           "--seed", "0"], capsys)
    assert out_env == out_123
    assert out_env != out_0


def test_bench_generated(capsys):
    code, out, _ = run_cli(
        ["bench", "--gen-count", "5", "--gen-n", "12", "--gen-m", "48",
         "--seed", "4"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    instance_rows = [r for r in rows if r["kind"] == "instance"]
    assert len(instance_rows) == 5
    for row in instance_rows:
        assert row["proved"] == "True"
        assert row["best_unsat"] == row["oracle_unsat"]
        assert float(row["ratio"]) <= 1.0
    cactus_rows = [r for r in rows if r["kind"] == "cactus"]
    assert len(cactus_rows) == 5
    ratio_rows = [r for r in rows if r["kind"] == "ratio"]
    assert all(float(r["ratio"]) <= 1.0 for r in ratio_rows)
    assert all(len(r) == len(rows[0]) for r in rows)


def test_bench_directory(tmp_path, capsys):
    for i in range(3):
        run_cli(["generate", "--n", "8", "--m", "24", "--seed", str(i),
                 "-o", str(tmp_path / f"i{i}.cnf")], capsys)
    capsys.readouterr()
    code, out, _ = run_cli(["bench", "--dir", str(tmp_path)], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len([r for r in rows if r["kind"] == "instance"]) == 3


def test_bench_empty_input(tmp_path, capsys):
    code, _, err = run_cli(["bench", "--dir", str(tmp_path)], capsys)
    assert code == 2
    assert "empty input set" in err


def test_module_entry_point(tmp_path):
    path = tmp_path / "tri.cnf"
    path.write_text(TRIANGLE)
    proc = subprocess.run(
        [sys.executable, "-m", "sdpsat", "solve", str(path), "--seed", "0"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "s OPTIMUM FOUND" in proc.stdout
