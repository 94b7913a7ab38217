"""Command-line dispatch: pinned reports, exit codes, and byte determinism."""

import json

import pytest

from noether_el import Ideal, Ring, dump_ideal
from noether_el.characters import (
    CharacterTriple,
    irreducible_characters,
    subquotient_A,
)
from noether_el.cli import dispatch, triple_from_dict, triple_to_dict
from noether_el.errors import ParseError, ValidationError
from noether_el.quotients import QuotientContext

ZX = Ring(1)
ZZ = Ring(0)


def run(argv, capsys):
    code, report = dispatch(argv)
    return code, report, capsys.readouterr().out


def write_ideal(tmp_path, name, ideal):
    path = tmp_path / name
    dump_ideal(ideal, str(path))
    return str(path)


def test_depth_compute_pinned_report(tmp_path, capsys):
    path = write_ideal(tmp_path, "xsq.json", Ideal(ZX, ["x^2"]))
    code, report, out = run(["depth", "compute", "--ideal", path], capsys)
    assert code == 0
    assert report["depth"] == "(x^2)"
    assert report["status"] == "Certified"
    assert json.loads(out) == report


def test_depth_commensurable(tmp_path, capsys):
    two = write_ideal(tmp_path, "two.json", Ideal(ZX, [2]))
    x = write_ideal(tmp_path, "x.json", Ideal(ZX, ["x"]))
    code, report, _ = run(
        ["depth", "commensurable", "--ideal", two, "--other", x], capsys)
    assert code == 0
    assert report["commensurable"] is False


def test_ideal_verbs(tmp_path, capsys):
    a = write_ideal(tmp_path, "a.json", Ideal(ZX, ["x^2", "2*x"]))
    b = write_ideal(tmp_path, "b.json", Ideal(ZX, ["x"]))
    code, report, _ = run(
        ["ideal", "quotient", "--ideal", a, "--other", b], capsys)
    assert code == 0
    assert sorted(report["result"]["generators"]) == ["2", "x"]
    code, report, _ = run(
        ["ideal", "equal", "--ideal", a, "--other", b], capsys)
    assert code == 0 and report["equal"] is False
    fin = write_ideal(tmp_path, "fin.json", Ideal(ZX, [2, "x"]))
    code, report, _ = run(["ideal", "structure", "--ideal", fin], capsys)
    assert code == 0
    assert report["finite"] is True
    assert report["cardinality"] == 2
    assert report["invariant_factors"] == [2]
    code, report, _ = run(["ideal", "structure", "--ideal", b], capsys)
    assert code == 0
    assert report["finite"] is False and report["cardinality"] is None


def test_ideal_ring_mismatch(tmp_path, capsys):
    a = write_ideal(tmp_path, "a.json", Ideal(ZX, ["x"]))
    b = write_ideal(tmp_path, "b.json", Ideal(ZZ, [2]))
    code, report, _ = run(
        ["ideal", "sum", "--ideal", a, "--other", b], capsys)
    assert code == 2
    assert report["error"]["type"] == "ValidationError"


def test_ring_eval(capsys):
    code, report, _ = run(
        ["ring", "eval", "--vars", "1", "--expr", "x^2-1"], capsys)
    assert code == 0
    assert report["value"] == "x^2 - 1"


def test_mat_level_kinds(tmp_path, capsys):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"rows": [[3, 0], [0, 3]]}))
    code, report, _ = run(["mat", "level", "--matrix", str(path)], capsys)
    assert code == 0 and report["level"] == "(0)"
    code, report, _ = run(
        ["mat", "level", "--matrix", str(path), "--kind", "identity"], capsys)
    assert code == 0 and report["level"] == "(2)"


def test_mat_invert_and_normal_form(tmp_path, capsys):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"rows": [[1, 2], [0, 1]]}))
    code, report, _ = run(["mat", "invert", "--matrix", str(good)], capsys)
    assert code == 0
    assert report["inverse"] == [[1, -2], [0, 1]]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"rows": [[2, 0], [0, 1]]}))
    code, report, _ = run(["mat", "invert", "--matrix", str(bad)], capsys)
    assert code == 2
    assert report["error"]["type"] == "NotInvertible"
    g = tmp_path / "g.json"
    g.write_text(json.dumps({"rows": [[1, 4, 0], [0, 1, 0], [2, 0, 1]]}))
    code, report, _ = run(["mat", "normal-form", "--matrix", str(g)], capsys)
    assert code == 0
    assert report["exact"] is True
    assert sorted(report["parts"]) == ["h", "h_prime", "n", "v", "v_prime"]


def test_group_order_and_center_word(capsys):
    code, report, _ = run(["group", "order", "--mod", "3", "--d", "2"],
                          capsys)
    assert code == 0 and report["order"] == 24
    code, report, _ = run(
        ["group", "center-word", "--mod", "7", "--d", "3", "--unit", "2"],
        capsys)
    assert code == 0
    assert report["length"] == len(report["letters"]) > 0
    # 3 has order 6 in (Z/7)^x, so 3*I is not a product of elementaries
    code, report, _ = run(
        ["group", "center-word", "--mod", "7", "--d", "3", "--unit", "3"],
        capsys)
    assert code == 2
    assert report["error"]["type"] == "ValidationError"


def test_measures_classify_pinned(tmp_path, capsys):
    out = tmp_path / "report.json"
    code, report, text = run(
        ["measures", "classify", "--mod", "4", "--d", "2",
         "--out", str(out)], capsys)
    assert code == 0
    assert report["ergodic_count"] == 3
    assert report["support_sizes"] == [1, 3, 12]
    assert report["bijection_ok"] is True
    assert out.read_text() == text


def test_selftest_quick(capsys):
    code, report, _ = run(["selftest", "--suite", "quick"], capsys)
    assert code == 0
    assert report["passed"] is True
    assert all(entry["ok"] for entry in report["results"])


def test_selftest_examples(capsys):
    code, report, _ = run(["selftest", "--suite", "paper-examples"], capsys)
    assert code == 0
    assert report["passed"] is True
    assert [entry["name"] for entry in report["results"]] == [
        "depth-x-powers",
        "depth-integers-unit",
        "two-x-not-commensurable",
        "measures-mod4-d2",
        "fourier-haar-mod4",
        "center-words-mod7-d3",
        "el3-f2-degrees",
        "induced-trace-spot",
    ]


def test_char_round_trip(tmp_path, capsys):
    triple = tmp_path / "t.json"
    code, report, _ = run(
        ["char", "make-triple", "--mod", "2", "--d", "3", "--level", "1",
         "--kernel", "2", "--degree", "7", "--out", str(triple)], capsys)
    assert code == 0
    assert report["model"]["orbit"][0]["degree"] == 7
    assert json.loads(triple.read_text()) == report

    code, report, _ = run(
        ["char", "validate", "--triple", str(triple)], capsys)
    assert code == 0
    assert report["passed"] is True
    assert report["depth_status"] == "Certified"

    code, report, _ = run(
        ["char", "induce", "--triple", str(triple), "--ball", "2",
         "--sample", "12", "--seed", "3"], capsys)
    assert code == 0
    assert report["passed"] is True
    assert abs(report["probes"]["e12_1"][0] + 1 / 7) < 1e-9
    assert abs(report["probes"]["e12_2"][0] - 1) < 1e-9
    assert report["ball"]["size"] == 121

    code, report, _ = run(
        ["char", "recover", "--triple", str(triple), "--ball", "3"], capsys)
    assert code == 0
    assert report["matches_declared"] is True
    assert report["level"] == "(1)" and report["kernel"] == "(2)"
    assert report["orbit_indices"] == [4]


def test_char_validate_reports_failure_with_exit_two(tmp_path, capsys):
    # depth of (2) in Z[x] is (2) itself, not (x): the triple fails but
    # the report is still emitted
    triple = CharacterTriple(Ideal(ZX, ["x"]), Ideal(ZX, [2]), ())
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(triple_to_dict(triple)))
    code, report, out = run(["char", "validate", "--triple", str(path)],
                            capsys)
    assert code == 2
    assert report["passed"] is False
    assert report["depth_ok"] is False
    assert report["depth_ideal"] == "(2)"
    assert json.loads(out) == report


def test_char_make_triple_unknown_degree(capsys):
    code, report, _ = run(
        ["char", "make-triple", "--mod", "2", "--d", "3", "--level", "1",
         "--kernel", "2", "--degree", "5"], capsys)
    assert code == 2
    assert "degree 5" in report["error"]["message"]


def test_triple_json_survives_class_reordering():
    ctx = QuotientContext.integers_mod(2)
    group, _ = subquotient_A(ctx, 3, Ideal(ZZ, [1]), Ideal(ZZ, [2]))
    chi = irreducible_characters(group)[4]
    triple = CharacterTriple(Ideal(ZZ, [1]), Ideal(ZZ, [2]), (chi,), group)
    data = triple_to_dict(triple)
    shuffled = json.loads(json.dumps(data))
    shuffled["model"]["classes"] = data["model"]["classes"][::-1]
    shuffled["model"]["orbit"] = [
        {"degree": entry["degree"], "values": entry["values"][::-1]}
        for entry in data["model"]["orbit"]
    ]
    rebuilt = triple_from_dict(shuffled)
    assert rebuilt.orbit[0].degree == 7
    assert max(abs(a - b) for a, b in
               zip(rebuilt.orbit[0].values, chi.values)) < 1e-9


def test_triple_json_validation():
    with pytest.raises(ParseError):
        triple_from_dict({"kernel": {"ring": {"vars": 0},
                                     "generators": ["2"]}})
    base = {
        "level": {"ring": {"vars": 0}, "generators": ["1"]},
        "kernel": {"ring": {"vars": 0}, "generators": ["2"]},
        "d": 3,
        "model": {"modulus": 2, "classes": [[1, 0, 0, 0, 1, 0, 0, 0, 1]],
                  "orbit": []},
    }
    with pytest.raises(ValidationError):
        triple_from_dict(base)  # one representative for six classes


def test_exit_codes_for_parse_failures(tmp_path, capsys):
    code, report, _ = run(
        ["depth", "compute", "--ideal", str(tmp_path / "missing.json")],
        capsys)
    assert code == 1
    assert report["error"]["type"] == "FileNotFoundError"
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    code, report, _ = run(["depth", "compute", "--ideal", str(bad)], capsys)
    assert code == 1
    assert report["error"]["type"] == "ParseError"


def test_unknown_commands_show_usage():
    with pytest.raises(SystemExit) as info:
        dispatch(["bogus"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        dispatch(["selftest", "--nope"])
    assert info.value.code == 2


def test_flag_caps_must_be_positive(capsys):
    code, report, _ = run(
        ["selftest", "--suite", "quick", "--max-elements", "0"], capsys)
    assert code == 2
    assert report["error"]["type"] == "ValidationError"


def test_caps_cut_off_enumeration(capsys):
    code, report, _ = run(
        ["group", "order", "--mod", "4", "--d", "3",
         "--max-elements", "50"], capsys)
    assert code == 1
    assert report["error"]["type"] == "CapExceeded"


def test_caps_env_accepts_inline_json_and_file(tmp_path, capsys,
                                               monkeypatch):
    monkeypatch.setenv("NOETHER_EL_CAPS", '{"max_elements": 50}')
    code, report, _ = run(["group", "order", "--mod", "4", "--d", "3"],
                          capsys)
    assert code == 1 and report["error"]["type"] == "CapExceeded"
    config = tmp_path / "caps.json"
    config.write_text('{"max_elements": 50}')
    monkeypatch.setenv("NOETHER_EL_CAPS", str(config))
    code, report, _ = run(["group", "order", "--mod", "4", "--d", "3"],
                          capsys)
    assert code == 1 and report["error"]["type"] == "CapExceeded"
    monkeypatch.setenv("NOETHER_EL_CAPS", str(tmp_path / "nowhere.json"))
    code, report, _ = run(["group", "order", "--mod", "4", "--d", "3"],
                          capsys)
    assert code == 1 and report["error"]["type"] == "ParseError"


def test_text_format(tmp_path, capsys):
    path = write_ideal(tmp_path, "xsq.json", Ideal(ZX, ["x^2"]))
    code, _, out = run(
        ["depth", "compute", "--ideal", path, "--format", "text"], capsys)
    assert code == 0
    assert 'depth = "(x^2)"' in out
    assert 'status = "Certified"' in out


def test_reports_are_byte_identical(tmp_path, capsys):
    argv = ["measures", "classify", "--mod", "4", "--d", "2"]
    _, _, first = run(argv, capsys)
    _, _, second = run(argv, capsys)
    assert first == second
    path = write_ideal(tmp_path, "xsq.json", Ideal(ZX, ["x^2"]))
    argv = ["depth", "compute", "--ideal", path, "--seed", "5"]
    _, _, first = run(argv, capsys)
    _, _, second = run(argv, capsys)
    assert first == second
