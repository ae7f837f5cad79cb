import json

import pytest

from cantorfull.cli import main
from cantorfull.parser import Parser
from cantorfull.pmap import eq

from oracles import pm


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code = main(list(argv) + ["--json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_eq_exit_codes(capsys):
    code, out = run(capsys, "eq", "[0->1,1->0]", "[1->0,0->1]")
    assert code == 0
    assert "True" in out
    code, _ = run(capsys, "eq", "[0->1,1->0]", "1")
    assert code == 1


def test_normalize(capsys):
    code, out = run(capsys, "normalize", "{00, 01, 1}")
    assert code == 0
    assert "{~}" in out


def test_compose_restrict_star_join_roundtrip(capsys):
    code, payload = run_json(capsys, "compose", "[0->10]", "[1->0]")
    assert code == 0
    assert eq(Parser(2).parse_element(payload["value"]), pm(2, "1->10"))

    code, payload = run_json(capsys, "restrict", "[0->1,1->0]", "{01}")
    assert eq(Parser(2).parse_element(payload["value"]), pm(2, "01->11"))

    code, payload = run_json(capsys, "star", "[0->10]")
    assert eq(Parser(2).parse_element(payload["value"]), pm(2, "10->0"))

    code, payload = run_json(capsys, "join", "[0->1]", "[10->01]")
    assert eq(Parser(2).parse_element(payload["value"]), pm(2, "0->1", "10->01"))


def test_leq_compat(capsys):
    assert run(capsys, "leq", "[00->100]", "[0->10]")[0] == 0
    assert run(capsys, "leq", "[0->1]", "[0->0]")[0] == 1
    assert run(capsys, "compat", "[0->1]", "[10->01]")[0] == 0
    assert run(capsys, "compat", "[0->0]", "[0->1]")[0] == 1


def test_eval_modes(capsys):
    code, payload = run_json(capsys, "eval", "[0->10]", "011")
    assert code == 0
    assert payload["prefix"] == [1, 0, 1, 1]
    code, payload = run_json(capsys, "eval", "[0->10]", "1")
    assert code == 1
    assert payload["kind"] == "undefined"


def test_expression_arguments(capsys):
    code, payload = run_json(
        capsys, "eq", "cyc * cyc", "1", "--gens", "higman_thompson:2"
    )
    assert code == 0 and payload["result"] is True
    code, _ = run(capsys, "eq", "s00_01 @{000}", "[000->010]", "--gens", "higman_thompson:2")
    assert code == 0


def test_gen_list_show(capsys):
    code, payload = run_json(capsys, "gen", "list")
    assert code == 0
    assert "higman_thompson" in payload["value"]
    code, payload = run_json(capsys, "gen", "show", "grigorchuk")
    assert code == 0
    assert set(payload["generators"]) == {"a", "b", "c", "d"}


def test_bi_enumerate_and_member(capsys):
    code, payload = run_json(
        capsys, "bi", "enumerate", "--gens", "higman_thompson:2", "--len", "1",
        "--depth", "1", "--limit", "5",
    )
    assert code == 0
    assert len(payload["elements"]) == 5
    code, payload = run_json(
        capsys, "bi", "member", "cyc", "--gens", "higman_thompson:2",
        "--len", "1", "--depth", "1",
    )
    assert code == 0
    assert payload["status"] == "witness"


def test_msec_commands(capsys):
    lit = "msec({00}; [00->01], [00->10])"
    code, payload = run_json(capsys, "msec", "build", lit)
    assert code == 0 and payload["value"]["degree"] == 3
    code, payload = run_json(capsys, "msec", "element", lit, "--perm", "1,2,0")
    assert code == 0
    assert eq(
        Parser(2).parse_element(payload["value"]),
        pm(2, "00->01", "01->10", "10->00", "11->11"),
    )
    code, _ = run(capsys, "msec", "cover", lit, "--parts", "{000}", "{001}")
    assert code == 0
    lit5 = "msec({000}; [000->001], [000->010], [000->011], [000->100])"
    code, payload = run_json(
        capsys, "msec", "factor", lit5, "--perm", "1,2,0,3,4",
        "--parts", "{0000}", "{0001}",
    )
    assert code == 0
    assert payload["status"] == "witness"
    assert len(payload["witness"]["word"]) == 2


def test_msec_combine(capsys):
    code, payload = run_json(
        capsys, "msec", "combine",
        "msec({00}; [00->01], [00->100])",
        "msec({01}; [01->101], [01->110])",
    )
    assert code == 0
    assert payload["value"]["degree"] == 5


def test_msec_extend_exit_codes(capsys):
    lit = "msec({00}; [00->01], [00->10])"
    code, _ = run(capsys, "msec", "extend", lit, "--gens", "higman_thompson:2")
    assert code == 0
    code, _ = run(capsys, "msec", "extend", lit, "--len", "1")
    assert code == 2  # no generators loaded: exhausted at bound


def test_genkit_pipeline(capsys):
    code, payload = run_json(
        capsys, "genkit", "verify", "--gens", "higman_thompson:2",
        "--partition", "atoms:3",
    )
    assert code == 0
    code, payload = run_json(
        capsys, "genkit", "build", "--gens", "higman_thompson:2",
        "--partition", "atoms:3",
    )
    assert code == 0 and payload["sections"] > 0
    code, payload = run_json(
        capsys, "genkit", "express", "--gens", "higman_thompson:2",
        "--partition", "atoms:3",
        "--msec", "msec({0000}; s00_01@{0000}, s00_10@{0000})",
        "--perm", "1,2,0",
    )
    assert code == 0
    assert payload["status"] == "witness"


def test_dyn_commands(capsys):
    code, payload = run_json(
        capsys, "dyn", "expansive", "--gens", "higman_thompson:2",
        "--partition", "atoms:1", "--depth", "3", "--len", "4",
    )
    assert code == 0 and payload["status"] == "witness"

    code, payload = run_json(
        capsys, "dyn", "minimal", "--gens", "higman_thompson:2",
        "--depth", "2", "--len", "3",
    )
    assert code == 0

    code, payload = run_json(
        capsys, "dyn", "compress", "--gens", "higman_thompson:2",
        "--source", "{0}", "--target", "{11}", "--len", "4",
    )
    assert code == 0

    code, payload = run_json(
        capsys, "dyn", "orbit", "--gens", "higman_thompson:2",
        "--prefix", "0", "--count", "5", "--len", "6",
    )
    assert code == 0

    code, payload = run_json(
        capsys, "dyn", "split", "--gens", "higman_thompson:2", "--element", "cyc"
    )
    assert code == 0

    code, payload = run_json(
        capsys, "dyn", "rigid", "--gens", "higman_thompson:2",
        "--element", "s00_01", "--partition", "{0};{1}",
    )
    assert code == 0

    code, payload = run_json(
        capsys, "dyn", "code", "--gens", "higman_thompson:2",
        "--partition", "atoms:1", "--prefix", "00", "--words", "cyc", "1",
    )
    assert code == 0 and payload["value"] == [1, 0]


def test_usage_errors(capsys):
    assert main(["nonsense"]) == 3
    assert main(["eq", "[0->"]) == 3
    assert main(["eq", "[0->1,1->0]"]) == 3


def test_generator_file(tmp_path, capsys):
    gens = tmp_path / "gens.txt"
    gens.write_text("sw = [0->1, 1->0]\nid2 = 1\n")
    code, payload = run_json(capsys, "eq", "sw * sw", "id2", "--gens", str(gens))
    assert code == 0 and payload["result"] is True


def test_text_and_json_agree(capsys):
    code_t, out = run(capsys, "dyn", "minimal", "--gens", "higman_thompson:2", "--depth", "1", "--len", "2")
    code_j, payload = run_json(capsys, "dyn", "minimal", "--gens", "higman_thompson:2", "--depth", "1", "--len", "2")
    assert code_t == code_j == 0
    assert "witness" in out and payload["status"] == "witness"


CERT_SCHEMA = {
    "type": "object",
    "properties": {
        "status": {"enum": ["witness", "refuted_at_bound", "exhausted_at_bound"]},
        "bounds": {"type": "object"},
        "nodes_explored": {"type": "integer", "minimum": 0},
        "witness": {},
        "refuted": {},
        "detail": {"type": "string"},
    },
    "required": ["status", "bounds", "nodes_explored"],
}


def test_certificate_json_schema(capsys):
    import jsonschema

    for argv in (
        ["dyn", "expansive", "--gens", "higman_thompson:2", "--partition", "atoms:1",
         "--depth", "2", "--len", "3"],
        ["dyn", "orbit", "--gens", "higman_thompson:2", "--prefix", "0",
         "--count", "5", "--len", "6"],
        ["bi", "member", "cyc", "--gens", "higman_thompson:2", "--len", "1", "--depth", "1"],
    ):
        code, payload = run_json(capsys, *argv)
        payload.pop("op")
        jsonschema.validate(payload, CERT_SCHEMA)
