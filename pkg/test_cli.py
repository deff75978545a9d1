import json
from pathlib import Path

import pytest

from operads.category import identity, morphism_from_json, morphism_to_json
from operads.cli import EXIT_FAILED, EXIT_INPUT, EXIT_OK, run

SAMPLES = Path(__file__).parent / "samples"


def sample(name: str) -> str:
    return str(SAMPLES / name)


def cli(capsys, *argv):
    code = run([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_enumerate_prints_one_class_for_the_tripod(capsys):
    code, out, _ = cli(capsys, "enumerate", "--g", 0, "--n", 3)
    assert code == EXIT_OK
    assert len(json.loads(out)) == 1


def test_enumerate_as_table(capsys):
    code, out, _ = cli(capsys, "--format", "table", "enumerate", "--g", 1, "--n", 1)
    assert code == EXIT_OK
    assert len(out.strip().splitlines()) == 2
    assert "|Aut|=2" in out


def test_enumerate_refuses_unstable_types_without_a_budget(capsys):
    code, _, err = cli(capsys, "enumerate", "--g", 0, "--n", 2)
    assert code == EXIT_INPUT
    assert "not stable" in err
    code, out, _ = cli(capsys, "enumerate", "--g", 0, "--n", 2, "--max-vertices", 2)
    assert code == EXIT_OK and len(json.loads(out)) == 2


def test_compose_with_a_mismatched_middle_object(capsys):
    path = sample("glue_two_corollas.json")
    code, out, err = cli(capsys, "compose", "--first", path, "--second", path)
    assert code == EXIT_INPUT
    assert out == ""
    assert "objects mismatch" in err


def test_compose_with_the_identity(capsys, tmp_path):
    first = json.loads(Path(sample("glue_two_corollas.json")).read_text(encoding="utf-8"))
    ident = tmp_path / "identity.json"
    ident.write_text(json.dumps(morphism_to_json(identity(morphism_from_json(first).target))), encoding="utf-8")
    code, out, _ = cli(capsys, "compose", "--first", sample("glue_two_corollas.json"), "--second", ident)
    assert code == EXIT_OK
    assert morphism_from_json(json.loads(out)) == morphism_from_json(first)


def test_tensor_of_two_morphisms(capsys):
    code, out, _ = cli(capsys, "tensor", "--files", sample("close_loop.json"), sample("glue_two_corollas.json"))
    assert code == EXIT_OK
    m = morphism_from_json(json.loads(out))
    assert len(m.target.vertices) == 2
    assert len(m.glue.edges) == 2


def test_validate_detects_a_morphism(capsys):
    code, out, _ = cli(capsys, "validate", "--file", sample("glue_two_corollas.json"))
    assert code == EXIT_OK
    assert json.loads(out) == {"kind": "morphism", "valid": True, "problems": []}


def test_check_flavor(capsys):
    assert cli(capsys, "check-flavor", "--file", sample("close_loop.json"), "--flavor", "G")[0] == EXIT_OK
    assert cli(capsys, "check-flavor", "--file", sample("close_loop.json"), "--flavor", "G0")[0] == EXIT_FAILED


def test_morita_check_on_the_matrix_sample(capsys):
    code, out, _ = cli(capsys, "morita-check", "--file", sample("matrix_morita.json"))
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["ok"] is True
    assert report["details"]["quotient_dim"] == 1


def test_morita_check_falls_back_to_an_algebra_with_trace(capsys):
    code, out, _ = cli(capsys, "morita-check", "--file", sample("matrix_trace.json"))
    assert code == EXIT_OK
    assert json.loads(out)["subject"] == "1-dimensional modular operad"


def test_end_action_of_a_loop(capsys):
    code, out, _ = cli(capsys, "end-action", "--space", sample("hyperbolic_plane.json"),
                       "--morphism", sample("close_loop.json"))
    assert code == EXIT_OK
    payload = json.loads(out)
    assert (payload["rows"], payload["cols"]) == (2, 8)
    # the hyperbolic form pairs basis vectors 0 and 1
    assert payload["matrix"][0] == ["0/1", "1/1", "1/1", "0/1", "0/1", "0/1", "0/1", "0/1"]


def test_free_value_of_the_point(capsys):
    code, out, _ = cli(capsys, "free", "--smodule", sample("point_03.json"), "--g", 0, "--n", 4)
    assert code == EXIT_OK
    assert json.loads(out)["size"] == 3


def test_monad_check_passes_for_the_point(capsys):
    code, out, _ = cli(capsys, "monad-check", "--smodule", sample("point_03_11.json"), "--bound", 1)
    assert code == EXIT_OK
    assert json.loads(out)["ok"] is True


def test_algebra_check_on_the_scalar_line(capsys):
    assert cli(capsys, "algebra-check", "--space", sample("scalar_line.json"), "--bound", 2)[0] == EXIT_OK


def test_algebra_check_on_a_free_operad(capsys):
    assert cli(capsys, "algebra-check", "--smodule", sample("point_03.json"))[0] == EXIT_OK


def test_census_is_deterministic(capsys):
    first = cli(capsys, "census", "--bound", 2)
    second = cli(capsys, "census", "--bound", 2)
    assert first[0] == EXIT_OK
    assert first[1] == second[1]
    rows = json.loads(first[1])
    assert [r["count"] for r in rows] == [1, 4, 2, 5, 7]


def test_category_laws_command(capsys):
    code, out, _ = cli(capsys, "--seed", 3, "category-laws", "--count", 20, "--flavor", "G")
    assert code == EXIT_OK
    assert json.loads(out)["checked"] >= 20


@pytest.mark.parametrize("content", ["{", "[1, 2", ""])
def test_malformed_json_is_an_input_error(capsys, tmp_path, content):
    bad = tmp_path / "bad.json"
    bad.write_text(content, encoding="utf-8")
    code, _, err = cli(capsys, "validate", "--file", bad)
    assert code == EXIT_INPUT
    assert "malformed JSON" in err


def test_missing_file_is_an_input_error(capsys, tmp_path):
    code, _, err = cli(capsys, "canon", "--file", tmp_path / "nowhere.json")
    assert code == EXIT_INPUT
    assert "file not found" in err


def test_schema_error_names_the_path(capsys, tmp_path):
    data = json.loads(Path(sample("close_loop.json")).read_text(encoding="utf-8"))
    data["glue"]["genus"]["u"] = -1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data), encoding="utf-8")
    code, _, err = cli(capsys, "validate", "--file", bad)
    assert code == EXIT_INPUT
    assert "/glue/genus/u" in err


def test_usage_errors_exit_with_two(capsys):
    assert cli(capsys, "no-such-command")[0] == EXIT_INPUT
    assert cli(capsys, "enumerate", "--g", 0)[0] == EXIT_INPUT
    assert cli(capsys, "--version")[0] == EXIT_OK


def test_missing_config_file_is_an_input_error(capsys, tmp_path):
    code, _, err = cli(capsys, "--config", tmp_path / "missing.env", "census", "--bound", 1)
    assert code == EXIT_INPUT
    assert "config file not found" in err


def test_canon_refuses_a_graph_with_a_partial_involution(capsys, tmp_path):
    bad = tmp_path / "graph.json"
    bad.write_text(json.dumps({
        "flags": ["a", "b"], "vertices": ["u"],
        "incidence": {"a": "u", "b": "u"}, "involution": {"a": "b"}, "genus": {"u": 0},
    }), encoding="utf-8")
    code, out, err = cli(capsys, "canon", "--file", bad)
    assert code == EXIT_INPUT
    assert out == ""
    assert "involution undefined at b" in err


@pytest.mark.parametrize("command", ["end-action", "compose", "check-flavor"])
def test_inconsistent_morphisms_are_input_errors(capsys, tmp_path, command):
    data = json.loads(Path(sample("close_loop.json")).read_text(encoding="utf-8"))
    data["target"]["genus"]["u"] = 0
    bad = tmp_path / "morphism.json"
    bad.write_text(json.dumps(data), encoding="utf-8")
    argv = {
        "end-action": ["--space", sample("hyperbolic_plane.json"), "--morphism", bad],
        "compose": ["--first", bad, "--second", bad],
        "check-flavor": ["--file", bad, "--flavor", "G"],
    }[command]
    code, _, err = cli(capsys, command, *argv)
    assert code == EXIT_INPUT
    assert "its component has genus 1" in err


def test_unknown_log_level_is_an_input_error(capsys, tmp_path):
    env = tmp_path / "operads.env"
    env.write_text("OPERADS_LOG_LEVEL=FOO\n", encoding="utf-8")
    code, _, err = cli(capsys, "--config", env, "census", "--bound", 1)
    assert code == EXIT_INPUT
    assert "logging level" in err
