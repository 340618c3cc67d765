from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import pytest

import dimlift.cli as cli


def _run(argv: list[str]) -> int:
    try:
        cli.main(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 1
    return 0


def test_lift_square_sample(capsys):
    assert _run(["lift", "sample:square", "--no-color"]) == 0

    captured = capsys.readouterr()
    out = json.loads(captured.out)
    assert out["header"]["tool"] == "dimlift"
    assert out["verification"]["all_passed"] is True
    assert set(out["objects"]) == {"0", "a", "b", "1"}
    assert "All checks passed" in captured.err


def test_lift_chain3_sample(capsys):
    assert _run(["lift", "sample:chain3", "--quiet"]) == 0
    assert json.loads(capsys.readouterr().out)["cases"]


def test_lift_cube_is_unsupported(capsys):
    assert _run(["lift", "sample:cube", "--no-color"]) == 3
    assert "not dismantlable" in capsys.readouterr().err


def test_malformed_json_exit_code(tmp_path: Path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"poset": ')
    assert _run(["lift", str(bad), "--no-color"]) == 2
    assert "Could not read input" in capsys.readouterr().err


def test_poset_is_not_a_diagram(capsys):
    assert _run(["lift", "sample:square_poset", "--quiet"]) == 2


def test_size_cap_exit_code(capsys):
    assert _run(["lift", "sample:square", "--max-dim", "2", "--no-color"]) == 4
    assert "--max-dim" in capsys.readouterr().err


def test_missing_config_file(tmp_path: Path, capsys):
    code = _run(["lift", "sample:square", "--config", str(tmp_path / "nope.yml")])
    assert code == 2
    assert "Configuration file not found" in capsys.readouterr().err


def test_lift_then_verify(tmp_path: Path, capsys):
    saved = tmp_path / "lift.json"
    assert _run(["lift", "sample:square", "--out", str(saved), "--quiet"]) == 0
    assert _run(["verify", "sample:square", str(saved), "--quiet"]) == 0
    assert json.loads(capsys.readouterr().out)["all_passed"] is True

    data = json.loads(saved.read_text())
    key = next(k for k in data["arrows"] if k.startswith("0<1"))
    row = data["arrows"][key][0]
    row[0] = str(Fraction(row[0]) + 1)
    saved.write_text(json.dumps(data))
    assert _run(["verify", "sample:square", str(saved), "--no-color"]) == 1


def test_dismantle_square(capsys):
    assert _run(["dismantle", "sample:square_poset", "--quiet"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["verdict"] == "dismantlable"
    assert len(out["removal_order"]) == 4


def test_dismantle_cube(capsys):
    assert _run(["dismantle", "sample:cube_poset", "--quiet"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["verdict"] == "not dismantlable"
    assert len(out["stuck"][0]) == 8


def test_export_dot_square(capsys):
    assert _run(["export-dot", "sample:square_poset", "--quiet"]) == 0
    dot = capsys.readouterr().out
    assert dot.startswith("digraph")
    assert dot.count("[label=") == 4


def test_export_dot_cube_falls_back_to_arities(capsys):
    assert _run(["export-dot", "sample:cube", "--no-color"]) == 0
    captured = capsys.readouterr()
    assert "2^" in captured.out
    assert "Annotating arities only" in captured.err


def test_counterexample_q_example(capsys):
    assert _run(["counterexamples", "q-example", "--quiet"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["counterexample"] == "q-example"
    assert out["report"]["passed"] is True


def test_suite_with_trials_and_seed(capsys):
    assert _run(["suite", "dismantle", "--trials", "5", "--seed", "3", "--quiet"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["header"]["seed"] == 3
    assert out["report"]["trials"] == 5


def test_unknown_suite_rejected_by_parser(capsys):
    assert _run(["suite", "everything"]) == 2


@pytest.mark.slow
def test_nonsimpl_square_counterexample(capsys):
    assert _run(["counterexamples", "nonsimpl-square", "--quiet"]) == 0
    report = json.loads(capsys.readouterr().out)["report"]
    assert report["summary"].startswith("100/100 infeasible")
