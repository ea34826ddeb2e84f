import json
import subprocess
import sys

import pytest

from mras.cli import EXIT_INPUT, EXIT_NO_STRATEGY, main
from mras.formats import parse_mra, parse_wcnf

from conftest import fixture_text, solver_cmd


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_synth_example(capsys):
    code, out, _ = run(capsys, "synth", "mex.mra", "--opt", "res")
    assert code == 0
    assert "resource cost: 7" in out and "unused resources: r4, r6" in out


def test_synth_json(capsys):
    code, out, _ = run(capsys, "synth", "mex.mra", "--format", "json")
    data = json.loads(out)
    assert data["costs"]["resource"] == data["forfeited_weight"] == 7
    assert data["strategy_map"]["kind"] == "partial, path-realized"


def test_synth_unwinnable(capsys):
    code, out, _ = run(capsys, "synth", "unwinnable.mra", "--opt", "res")
    assert code == EXIT_NO_STRATEGY == 10
    assert out == "no winning strategy exists\n"


def test_synth_without_optimisation(capsys):
    code, out, _ = run(capsys, "synth", "mex.mra", "--opt", "none", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["winning"] and data["costs"]["resource"] >= 7


def test_synth_external(capsys, monkeypatch):
    monkeypatch.setenv("MRAS_SOLVER_CMD", solver_cmd("rc2_solver.py"))
    code, out, _ = run(capsys, "synth", "mex.mra", "--solver", "external", "--wcnf-format", "2022")
    assert code == 0 and "forfeited soft weight: 7" in out


def test_synth_writes_pruned_system(capsys, tmp_path):
    pruned = tmp_path / "pruned.mra"
    out_file = tmp_path / "report.txt"
    code, out, _ = run(capsys, "synth", "mex_general.mra", "--opt", "mra",
                       "--pruned-out", str(pruned), "--out", str(out_file))
    assert code == 0 and out == ""
    assert parse_mra(pruned.read_text()).n_agents == 2
    assert "used agents: a1, a2" in out_file.read_text()


def test_synth_is_deterministic(capsys):
    first = run(capsys, "synth", "mex_general.mra", "--opt", "mra")[1]
    assert run(capsys, "synth", "mex_general.mra", "--opt", "mra")[1] == first


def test_input_errors(capsys, tmp_path):
    assert run(capsys, "synth", str(tmp_path / "missing.mra"))[0] == EXIT_INPUT
    bad = tmp_path / "bad.mra"
    bad.write_text(fixture_text("mex.mra").replace("period: 0, deadline: 1}", "period: 3, deadline: 1}", 1))
    code, _, err = run(capsys, "synth", str(bad))
    assert code == EXIT_INPUT and "exceeds deadline" in err
    assert run(capsys, "synth", "mex.mra", "--opt", "mra")[0] == EXIT_INPUT


def test_encode(capsys, tmp_path):
    target = tmp_path / "mex.wcnf"
    code, out, _ = run(capsys, "encode", "mex.mra", "--opt", "res", "--out", str(target))
    assert code == 0 and "soft clauses: 6" in out
    doc = parse_wcnf(target.read_text())
    assert len(doc.soft) == 6 and sum(w for _, w in doc.soft) == 12


def test_encode_without_optimisation(capsys):
    code, out, err = run(capsys, "encode", "mex.mra", "--opt", "none")
    assert code == 0 and parse_wcnf(out).soft == [] and "soft clauses: 0" in err


def test_encode_2022(capsys):
    _, out, _ = run(capsys, "encode", "mex.mra", "--wcnf-format", "2022")
    lines = out.splitlines()
    assert not lines[0].startswith("p") and lines[0].startswith("h ")


def test_simulate_tables(capsys):
    code, out, _ = run(capsys, "simulate", "mex.mra", "mex_cost7.sched")
    assert code == 0 and "winning: yes" in out and "resource cost: 7" in out
    code, out, _ = run(capsys, "simulate", "mex.mra", "mex_cost10.sched")
    assert "winning: yes" in out and "resource cost: 10" in out


def test_simulate_corrupted(capsys, tmp_path):
    bad = tmp_path / "bad.sched"
    bad.write_text(fixture_text("mex_cost7.sched").replace("a2: idle", "a2: rel_r1"))
    code, _, err = run(capsys, "simulate", "mex.mra", str(bad))
    assert code == EXIT_INPUT and "not available at step 0" in err


def test_check_bound(capsys):
    assert run(capsys, "check", "mex.mra", "mex_cost7.sched", "--bound", "7")[0] == 0
    code, out, _ = run(capsys, "check", "mex.mra", "mex_cost10.sched", "--bound", "7")
    assert code == 1 and "exceeds bound" in out
    code, out, _ = run(capsys, "check", "mex_general.mra", "mex_general_two_agents.sched", "--opt", "mra",
                       "--bound", "17")
    assert code == 0


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "mex.mra", "--opt", "res")
    assert code == 0 and out.startswith("optimal resources cost: 7")
    code, out, _ = run(capsys, "oracle", "unwinnable.mra")
    assert code == EXIT_NO_STRATEGY and out == "no winning strategy exists\n"
    code, _, err = run(capsys, "oracle", "mex.mra", "--cap", "10")
    assert code == EXIT_INPUT and "cap" in err


def test_gen_is_seeded(capsys):
    first = run(capsys, "gen", "--seed", "4")[1]
    assert run(capsys, "gen", "--seed", "4")[1] == first != run(capsys, "gen", "--seed", "5")[1]
    m = parse_mra(first)
    assert m.n_agents == 4 and [t.price for t in m.types] == [1, 2, 3, 4]
    assert all(5 <= g.deadline <= 15 and 1 <= len(g.types) <= 3 for g in m.goals)


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "mras.cli", "synth", "unwinnable.mra"],
                          capture_output=True, text=True)
    assert proc.returncode == 10 and proc.stdout == "no winning strategy exists\n"
