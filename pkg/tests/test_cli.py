import io
import json
import subprocess
import sys

import pytest

from twostep.cli import RunConfig, build_parser, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_catalog_lists_35():
    code, out, _ = call("catalog")
    assert code == 0 and len(out.splitlines()) == 35
    code, out, _ = call("catalog", "--format", "json")
    assert [r["name"] for r in json.loads(out)][:2] == ["N1_8_2", "N2_8_2"]


def test_profile_a8():
    code, out, _ = call("profile", "A8", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["orbit_dim"] == 0
    assert data["betti"] == [1, 8, 28, 56, 70, 56, 28, 8, 1]


def test_profile_text():
    code, out, _ = call("profile", "G37D")
    assert code == 0 and "orbit dim        37" in out


def test_printed_witness_passes():
    code, out, _ = call("check-witness", "corpus/n5_8_2_to_n53_n31.wit")
    assert code == 0, out
    assert out.startswith("PASS")


def test_printed_witness_reports_pole():
    code, out, _ = call("check-witness", "corpus/n5_8_2_to_n53_n31.wit", "--format", "json")
    rep = json.loads(out)
    assert code == 1 and rep["error"] == "pole" and "[y3,y7]" in rep["detail"]


def test_derived_witness_passes():
    code, out, _ = call("check-witness", "corpus/derived/N3_8_2_to_n53_n31.wit")
    assert code == 0 and out.startswith("PASS N3_8_2 -> n5_3+n3_1")


def test_obstruction_pair():
    code, out, _ = call("obstructions", "--pair", "N1_8_3", "G37D")
    assert code == 0 and out.startswith("N1_8_3 -> G37D: CohomologyDim(4): 30 > 28")


def test_obstruction_matrix_csv():
    code, out, _ = call("obstructions", "--matrix", "--format", "csv")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 36


def test_rigidity():
    code, out, _ = call("rigidity")
    assert out == "undominated: N1_8_2, N9_8_3, N1_8_4\n"
    code, out, _ = call("rigidity", "--external", "external.txt", "--format", "json")
    assert json.loads(out)["undominated"] == ["N1_8_2", "N9_8_3", "N1_8_4"]


def test_bstable_member_and_fuzz():
    code, out, _ = call("bstable", "--set", "S2", "--algebra", "N1_8_3", "--fuzz", "50",
                        "--s2-reading", "corrected")
    assert code == 0 and "0 counterexamples" in out


def test_bstable_literal_fuzz_fails():
    code, out, _ = call("bstable", "--set", "S2", "--algebra", "N1_8_3", "--fuzz", "50", "--format", "json")
    rep = json.loads(out)
    assert code == 1 and rep["fuzz"]["counterexamples"]


def test_bstable_adapted_presentation():
    code, out, _ = call("bstable", "--set", "S4", "--algebra", "adapted/n5_1_plus_n3_1_s4.alg")
    assert code == 0 and "yes" in out


def test_extend_b0():
    code, out, _ = call("extend", "--algebra", "cocycles/h3_c3.alg", "--cocycle", "cocycles/b0.coc", "--check-perp")
    assert code == 0
    assert "profile matches: n5_1+n3_1" in out
    assert "perp meets center trivially: False" in out
    assert "intersection contains e3" in out


def test_hasse_dot(tmp_path):
    target = tmp_path / "h.dot"
    code, out, _ = call("hasse", "--format", "dot", "--dot", str(target))
    assert code == 0 and out.startswith('digraph "degenerations"')
    assert target.read_text() == out


def test_components():
    code, out, _ = call("components", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["contradictions"] == []
    assert {"N1_8_2", "N9_8_3", "N1_8_4"} <= set(data["maximal"])


def test_verify_all_shipped():
    code, out, _ = call("verify-all")
    assert "components: N1_8_2, N9_8_3, N1_8_4" in out
    assert code == 0, out


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.wit"
    bad.write_text("source A8\ntarget A8\ny1 = t\n")
    code, _, err = call("check-witness", str(bad))
    assert code == 2
    assert f"{bad}:3" in err


def test_unknown_names_exit_2():
    assert call("profile", "nope")[0] == 2
    assert call("obstructions", "--pair", "A8", "nope")[0] == 2
    assert call("catalog", "--corpus", "/no/such/dir")[0] == 2
    assert call("catalog", "--seed", "-1")[0] == 2


@pytest.mark.parametrize("argv", [
    ["obstructions", "--matrix", "--format", "json"],
    ["hasse", "--format", "json"],
    ["profile", "N7_8_3", "--format", "json"],
])
def test_json_round_trip_and_repeatability(argv):
    first = call(*argv)[1]
    second = call(*argv)[1]
    assert first == second
    assert json.dumps(json.loads(first), indent=2, sort_keys=True) + "\n" == first


def test_subprocess_runs_are_byte_identical():
    cmd = [sys.executable, "-m", "twostep.cli", "bstable", "--set", "S1", "--algebra", "N3_8_2", "--fuzz", "10"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a


def test_run_config():
    args = build_parser().parse_args(["profile", "A8", "--seed", "3"])
    cfg = RunConfig.from_args(args)
    assert cfg.seed == 3 and cfg.format == "text" and cfg.borel == "upper"
