import json
import subprocess
import sys

import pytest

from helpers import SCALED
from reebtorus.cli import main


def run(*args):
    return main(list(args))


def test_splits_exit_zero(tmp_path, capsys):
    report, dot = tmp_path / "out.json", tmp_path / "g.dot"
    assert run("--builtin", SCALED, "--n", "32", "--report", str(report), "--dot", str(dot)) == 0
    d = json.loads(report.read_text(encoding="utf-8"))
    assert d["conclusion"] == "Splits" and d["formula"].endswith("ℤ² × π₀S′(f)")
    text = dot.read_text()
    assert text.startswith("digraph reeb {") and "peripheries=2" in text and text.count("->") == 4


def test_inconclusive_exit_two(capsys):
    assert run("analyze", "--builtin", "sinsin", "--n", "16") == 2
    assert json.loads(capsys.readouterr().out)["caveat_overapprox"] is True


def test_not_tree_exit_three(tmp_path, capsys):
    dot = tmp_path / "g.dot"
    assert run("--builtin", "twosaddle", "--n", "32", "--dot", str(dot)) == 3
    # undirected graph still written
    assert dot.read_text().startswith("graph reeb {")


def test_height_exit_three(tmp_path, capsys):
    dot = tmp_path / "g.dot"
    assert run("--builtin", "height", "--n", "16", "--dot", str(dot)) == 3
    assert not dot.exists()


def test_broken_mesh_exit_four(tmp_path, capsys):
    p = tmp_path / "broken.json"
    p.write_text(json.dumps({"triangles": [[0, 1, 2], [0, 1, 3], [0, 1, 4]], "values": [0, 1, 2, 3, 4]}))
    assert run("--mesh", str(p)) == 4
    captured = capsys.readouterr()
    assert "NonManifold" in captured.err
    assert json.loads(captured.out)["conclusion"].startswith("NotApplicable(InvalidInput")


@pytest.mark.parametrize(
    "args",
    [
        ["--mesh", "/nonexistent/mesh.json"],
        ["--builtin", "nope", "--n", "16"],
        ["--builtin", "sinsin", "--n", "4"],
        ["--builtin", "sinsin"],
        ["--builtin", "sinsin", "--n", "16", "--level-tol", "-1"],
        ["--builtin", "sinsin", "--mesh", "x.json", "--n", "16"],
        [],
    ],
)
def test_invalid_invocations_exit_four(args, capsys):
    assert run(*args) == 4


def test_unwritable_report(capsys):
    assert run("--builtin", SCALED, "--n", "16", "--report", "/nonexistent/dir/out.json") == 4


def test_export_round_trip(tmp_path, capsys):
    mesh = tmp_path / "m.json"
    assert run("export", "--builtin", SCALED, "--n", "16", "--out", str(mesh)) == 0
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run("--builtin", SCALED, "--n", "16", "--report", str(a)) == 0
    assert run("--mesh", str(mesh), "--report", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_export_random_tree_seeded(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run("export", "--random-tree", "--seed", "4", "--n", "16", "--out", str(a)) == 0
    assert run("export", "--random-tree", "--seed", "4", "--n", "16", "--out", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()
    assert run("export", "--n", "16", "--out", str(a)) == 4


def test_dot_is_stable(tmp_path, capsys):
    a, b = tmp_path / "a.dot", tmp_path / "b.dot"
    run("--builtin", "sinsin", "--n", "16", "--dot", str(a))
    run("--builtin", "sinsin", "--n", "32", "--dot", str(b))
    assert a.read_text() == b.read_text()


def test_lemma_check(capsys):
    assert run("lemma-check", "--max-n", "5") == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 5 and all(line.endswith("ok") for line in out)
    assert run("lemma-check", "--max-n", "12") == 4


def test_random_check(capsys):
    assert run("random-check", "--seed", "3", "--count", "2") == 0
    rows = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert len(rows) == 2 and all(r["ok"] for r in rows)
    assert run("random-check", "--n", "10") == 4


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "reebtorus", "--builtin", "twosaddle", "--n", "8", "-v"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 3
    assert "conclusion: NotApplicable(GraphNotTree)" in proc.stderr
