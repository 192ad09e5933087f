import json

import pytest

from supseq.cli import main


@pytest.fixture()
def case_file(tmp_path):
    path = tmp_path / "case.json"
    assert main(["case-study", str(path)]) == 0
    return path


@pytest.fixture()
def single_task_file(tmp_path):
    path = tmp_path / "single.json"
    path.write_text(
        json.dumps({"name": "one", "tasks": [{"name": "A", "kind": "single"}]}) + "\n",
        encoding="utf-8",
    )
    return path


def test_compose_reports_sizes_and_blocking(case_file, capsys):
    assert main(["compose", str(case_file), "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["states"] == 27
    assert payload["transitions"] == 46
    assert payload["nonblocking"] is False
    assert len(payload["blocking_states"]) == 1


def test_synthesize_minimized_sizes(case_file, capsys):
    assert main(["synthesize", str(case_file), "--minimize", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["states"] == 23
    assert payload["transitions"] == 40
    assert payload["certificates"] == {"controllable": True, "nonblocking": True}
    reasons = {reason for _, reason in payload["removed_states"]}
    assert reasons == {"NotCoreachable", "UncontrollablePredecessor"}


def test_verify_supervisor_passes(case_file, tmp_path, capsys):
    sup = tmp_path / "sup.json"
    assert main(["synthesize", str(case_file), "--minimize", "-o", str(sup)]) == 0
    capsys.readouterr()
    assert main(["verify", str(case_file), "--supervisor", str(sup)]) == 0
    out = capsys.readouterr().out
    assert "controllable: yes" in out
    assert "nonblocking: yes" in out


def test_verify_blocking_composite_fails_with_witness(case_file, tmp_path, capsys):
    comp = tmp_path / "comp.json"
    assert main(["compose", str(case_file), "-o", str(comp)]) == 0
    capsys.readouterr()
    assert main(["verify", str(case_file), "--supervisor", str(comp), "--json"]) == 1
    payload = json.loads(capsys.readouterr().out)
    assert payload["nonblocking"] is False
    assert payload["blocking_witness"]["trace"]


def test_enumerate_single_task_line(single_task_file, capsys):
    assert main(["enumerate", str(single_task_file)]) == 0
    out = capsys.readouterr().out
    assert out == "A_start A_done\n"


def test_enumerate_json(case_file, tmp_path, capsys):
    sup = tmp_path / "sup.json"
    main(["synthesize", str(case_file), "--minimize", "-o", str(sup)])
    capsys.readouterr()
    assert main(["enumerate", str(sup), "--max-len", "14", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["language_infinite"] is True
    assert payload["count"] is None
    assert payload["sequences"]
    assert payload["sequences"][0][0] == "C_start"


def test_export_dot_deterministic(case_file, tmp_path, capsys):
    sup = tmp_path / "sup.json"
    main(["synthesize", str(case_file), "-o", str(sup)])
    capsys.readouterr()
    assert main(["export-dot", str(sup)]) == 0
    first = capsys.readouterr().out
    assert main(["export-dot", str(sup)]) == 0
    second = capsys.readouterr().out
    assert first == second
    assert first.startswith("digraph")


def test_missing_file_is_a_clean_error(capsys):
    assert main(["compose", "no_such_file.json"]) == 2
    assert "error:" in capsys.readouterr().err


def test_invalid_model_is_a_clean_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert main(["compose", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "line 1" in err


def test_empty_supervisor_exits_one(tmp_path, capsys):
    doc = {
        "name": "trap",
        "tasks": [{"name": "A", "kind": "single"}],
        "events": [{"name": "A_done", "controllable": False}],
        "automata": [
            {
                "name": "no_completion",
                "kind": "spec",
                "states": ["t"],
                "initial": "t",
                "marked": ["t"],
                "alphabet": ["A_done"],
                "transitions": [],
            }
        ],
    }
    path = tmp_path / "trap.json"
    path.write_text(json.dumps(doc) + "\n", encoding="utf-8")
    assert main(["synthesize", str(path)]) == 1
    assert "no supervisor exists" in capsys.readouterr().out
