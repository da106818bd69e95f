import json

import jsonschema
import pytest

from setlogic import jsonio
from setlogic.cli import INPUT_ERROR, NEGATIVE, POSITIVE, UNKNOWN, run
from setlogic.kripke_set import as_kripke, vrank_model


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def call_json(capsys, schema, *argv):
    code, out, err = call(capsys, *argv, "--json")
    data = json.loads(out)
    jsonschema.validate(data, jsonio.OUTPUTS[schema])
    return code, data


@pytest.fixture
def v2(tmp_path):
    path = tmp_path / "v2.json"
    path.write_text(json.dumps(as_kripke(vrank_model(2)).to_json()))
    return str(path)


@pytest.fixture
def harrop(tmp_path):
    path = tmp_path / "rule.json"
    path.write_text(json.dumps({"premises": ["~p -> q | r"], "conclusions": ["(~p -> q) | (~p -> r)"]}))
    return str(path)


def test_prove_exit_codes(capsys):
    assert call(capsys, "prove", "--logic", "ipc", "p -> p")[0] == POSITIVE
    code, out, _ = call(capsys, "prove", "--logic", "ipc", "p | ~p")
    assert code == NEGATIVE and "countermodel" in out
    assert call(capsys, "prove", "--logic", "cpc", "p | ~p")[0] == POSITIVE


def test_prove_json(capsys):
    code, data = call_json(capsys, "prove", "prove", "--logic", "ipc", "~p | ~~p")
    assert code == NEGATIVE and data["verdict"] == "countermodel"
    jsonschema.validate(data["model"], jsonio.PROP_MODEL)


def test_admissible(capsys, harrop):
    code, data = call_json(capsys, "admissible", "admissible", "--logic", "ipc", harrop)
    assert code == POSITIVE and data["verdict"] == "admissible" and data["visser_steps"] == 1
    code, data = call_json(capsys, "admissible", "admissible", "--logic", "cpc", harrop)
    assert code == POSITIVE


def test_admissible_negative(capsys, tmp_path):
    path = tmp_path / "lem.json"
    path.write_text(json.dumps({"premises": ["true"], "conclusions": ["p | ~p"]}))
    code, data = call_json(capsys, "admissible", "admissible", "--logic", "ipc", str(path))
    assert code == NEGATIVE and data["verdict"] == "not-admissible"


def test_unify(capsys):
    code, out, _ = call(capsys, "unify", "--logic", "cqc", "exists x. P(x) & exists x. ~P(x)")
    assert code == NEGATIVE and out.strip() == "NOT_UNIFIABLE"
    code, data = call_json(capsys, "unify", "unify", "--logic", "cpc", "p & ~q")
    assert code == POSITIVE and data["ground_unifier"] == {"p": True, "q": False}


def test_sigma(capsys):
    code, data = call_json(capsys, "sigma", "sigma", "exists x. P(x)", "--conclusion", "forall y. P(y)")
    assert code == POSITIVE and data["passed"]


def test_model_check(capsys, v2):
    code, data = call_json(capsys, "model-check", "model", "check", v2, "exists x. forall y. ~y in x")
    assert code == POSITIVE and data["forced"] and data["kind"] == "set"
    assert call(capsys, "model", "check", v2, "exists x. exists y. exists z. (~x = y & ~y = z & ~x = z)")[0] == NEGATIVE


def test_extend(capsys, v2):
    code, data = call_json(capsys, "extend", "extend", v2, "--alpha", "2")
    assert code == POSITIVE and len(data["root_elements"]) == 3
    code, _, err = call(capsys, "extend", v2, "--alpha", "3", "--cap", "1")
    assert code == UNKNOWN and err.startswith("wb-error: cap:")


def test_axioms(capsys, v2):
    code, data = call_json(capsys, "axioms", "axioms", v2, "--rank", "0", "--axiom", "EmptySet")
    assert code == POSITIVE


def test_demos(capsys):
    assert call_json(capsys, "dp-demo", "dp-demo")[0] == POSITIVE
    assert call_json(capsys, "visser-demo", "visser-demo", "--n", "1")[0] == POSITIVE
    code, data = call_json(capsys, "dejongh", "dejongh", "--formula", "~p | ~~p")
    assert code == POSITIVE and data["passed"]


def test_property(capsys):
    code, data = call_json(capsys, "property", "property", "--cases", "50", "--seed", "3")
    assert code == POSITIVE and data["violations"] == []


def test_input_errors(capsys, tmp_path):
    code, _, err = call(capsys, "prove", "--logic", "ipc", "p |")
    assert code == INPUT_ERROR and err.startswith("wb-error: input:")
    code, _, err = call(capsys, "frobnicate")
    assert code == INPUT_ERROR and err.startswith("wb-error: usage:")
    code, _, _ = call(capsys, "model", "check", str(tmp_path / "missing.json"), "true")
    assert code == INPUT_ERROR
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, data = call_json(capsys, "error", "extend", str(bad))
    assert code == INPUT_ERROR


def test_output_is_deterministic(capsys, harrop):
    for argv in (["admissible", "--logic", "ipc", harrop], ["dejongh", "--formula", "p | ~p"],
                 ["prove", "--logic", "ipc", "((p -> q) -> p) -> p"]):
        first = call(capsys, *argv, "--json")
        assert call(capsys, *argv, "--json") == first
