"""End-to-end tests of the command line: exit codes, report contents,
and byte-determinism of reports and meshes."""

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from troptheta.cli import main

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def run(*args):
    runner = CliRunner()
    return runner.invoke(main, [str(a) for a in args])


def report_of(result):
    assert result.stdout.endswith("\n")
    return json.loads(result.stdout)


# ---------------------------------------------------------------- validate


def test_validate_good_variety_exits_zero():
    res = run("validate", FIXTURES / "variety_g1.json")
    assert res.exit_code == 0
    rep = report_of(res)
    assert rep["command"] == "validate"
    assert all(c["passed"] for c in rep["checks"])
    names = [c["name"] for c in rep["checks"]]
    assert "pairing-nondegenerate" in names
    assert "form-positive-definite" in names


def test_validate_degenerate_pairing_exits_one():
    res = run("validate", FIXTURES / "variety_degenerate.json")
    assert res.exit_code == 1
    rep = report_of(res)
    failed = {c["name"]: c["detail"] for c in rep["checks"] if not c["passed"]}
    assert failed["pairing-nondegenerate"] == "pairing degenerate"


def test_validate_malformed_json_exits_two(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    res = run("validate", p)
    assert res.exit_code == 2


def test_validate_missing_file_exits_two(tmp_path):
    res = run("validate", tmp_path / "absent.json")
    assert res.exit_code == 2


def test_validate_missing_fields_exits_two(tmp_path):
    p = tmp_path / "partial.json"
    p.write_text('{"g": 1, "P": [["2"]]}')
    res = run("validate", p)
    assert res.exit_code == 2


def test_validate_series_runs_cocycle_checks():
    res = run("validate", FIXTURES / "series_g1.json")
    assert res.exit_code == 0
    names = [c["name"] for c in report_of(res)["checks"]]
    assert names == ["construction", "cocycle-relation", "coefficient-invariance"]


def test_validate_theta_file():
    res = run("validate", FIXTURES / "theta_g1.json")
    assert res.exit_code == 0
    names = [c["name"] for c in report_of(res)["checks"]]
    assert names[0] == "construction"
    assert "polarization-finite-index" in names


# -------------------------------------------------------------------- eval


def test_eval_riemann_g1_points():
    res = run("eval", FIXTURES / "theta_g1.json", "0", "-3/2", "1")
    assert res.exit_code == 0
    results = report_of(res)["results"]
    assert results[0]["value"] == "0" and results[0]["witnesses"] == [[0]]
    assert results[1]["value"] == "-1/2" and results[1]["witnesses"] == [[1]]
    # v = 1 sits on the corner locus: two lattice classes tie
    assert results[2]["value"] == "0"
    assert results[2]["witnesses"] == [[-1], [0]]


def test_eval_rejects_wrong_arity():
    res = run("eval", FIXTURES / "theta_g1.json", "1,2")
    assert res.exit_code == 2


def test_eval_rejects_decimal_points():
    res = run("eval", FIXTURES / "theta_g1.json", "0.5")
    assert res.exit_code == 2


# ----------------------------------------------------------------- riemann


def test_riemann_stdout_is_loadable_theta(tmp_path):
    res = run("riemann", FIXTURES / "variety_g1.json")
    assert res.exit_code == 0
    doc = json.loads(res.stdout)
    assert doc["profile"] == [{"rep": [0], "w": "0"}]
    assert doc["factor"]["ell"] == ["0"]


def test_riemann_out_file_matches_fixture(tmp_path):
    out = tmp_path / "theta.json"
    res = run("riemann", FIXTURES / "variety_g1.json", "--out", out, "--point", "0")
    assert res.exit_code == 0
    rep = report_of(res)
    assert rep["results"][0]["value"] == "0"
    assert json.loads(out.read_text()) == json.loads((FIXTURES / "theta_g1.json").read_text())


def test_riemann_point_without_out_is_usage_error():
    res = run("riemann", FIXTURES / "variety_g1.json", "--point", "0")
    assert res.exit_code == 2


def test_riemann_rejects_non_principal(tmp_path):
    p = tmp_path / "np.json"
    p.write_text('{"g": 1, "P": [["2"]], "Lambda": [[2]]}')
    res = run("riemann", p)
    assert res.exit_code == 1
    rep = json.loads(res.stdout)
    assert not rep["checks"][0]["passed"]


# -------------------------------------------------------------- crosscheck


def test_crosscheck_suite_a_passes():
    res = run("crosscheck", "A", FIXTURES / "series_g1.json")
    assert res.exit_code == 0
    rep = report_of(res)
    assert rep["suite"] == "A" and rep["seed"] == 0 and rep["samples"] == 50
    assert rep["checks"][0]["detail"] == "350 exact identities"


def test_crosscheck_suite_b_g1_100_of_100():
    res = run("crosscheck", "B", FIXTURES / "period_g1.json")
    assert res.exit_code == 0
    rep = report_of(res)
    assert rep["checks"][0]["detail"].startswith("100/100")


def test_crosscheck_suite_b_g2():
    res = run("crosscheck", "B", FIXTURES / "period_g2.json", "--samples", "30")
    assert res.exit_code == 0
    assert report_of(res)["samples"] == 30


def test_crosscheck_suite_c_level_two():
    res = run("crosscheck", "C", FIXTURES / "level2_g1.json")
    assert res.exit_code == 0
    names = [c["name"] for c in report_of(res)["checks"]]
    assert names == ["difference-periodic", "valuation-identity"]


def test_crosscheck_suite_c_mismatched_cocycles_exits_one(tmp_path):
    f1 = json.loads((FIXTURES / "series_g1.json").read_text())
    f2 = {"T": [["q^(4)"]], "Lambda": [[1]], "c": ["q^(2)"], "coeffs": [{"rep": [0], "a": "1"}]}
    p = tmp_path / "pair.json"
    p.write_text(json.dumps({"f1": f1, "f2": f2}))
    res = run("crosscheck", "C", p)
    assert res.exit_code == 1
    rep = json.loads(res.stdout)
    assert rep["checks"][0]["name"] == "precondition"
    assert not rep["checks"][0]["passed"]


def test_crosscheck_suite_b_non_principal_exits_one():
    res = run("crosscheck", "B", FIXTURES / "level2_g1.json")
    assert res.exit_code == 1


# ----------------------------------------------------------------- divisor


def test_divisor_g1_single_corner_point(tmp_path):
    out = tmp_path / "mesh.json"
    res = run("divisor", FIXTURES / "variety_g1.json", "--out", out)
    assert res.exit_code == 0
    d = report_of(res)["divisor"]
    assert d["zero_cells"] == 1 and d["top_cells"] == 1
    assert d["betti"] == [1, 0] and d["euler_characteristic"] == 0
    assert json.loads(out.read_text())["g"] == 1


def test_divisor_g2_first_betti_two(tmp_path):
    out = tmp_path / "mesh.json"
    res = run("divisor", FIXTURES / "variety_g2.json", "--out", out)
    assert res.exit_code == 0
    d = report_of(res)["divisor"]
    assert d["betti"] == [1, 2]
    assert d["components"] == 1
    assert d["cells"] == 4


def test_divisor_accepts_series_input(tmp_path):
    out = tmp_path / "mesh.json"
    res = run("divisor", FIXTURES / "series_g1.json", "--out", out)
    assert res.exit_code == 0
    assert report_of(res)["divisor"]["zero_cells"] == 1


def test_divisor_rejects_svg_for_g1(tmp_path):
    res = run("divisor", FIXTURES / "variety_g1.json", "--out", tmp_path / "m.svg", "--format", "svg")
    assert res.exit_code == 2


def test_divisor_rank_cap_exits_two(tmp_path):
    p = tmp_path / "g4.json"
    P = [[str(2 if i == j else 0) for j in range(4)] for i in range(4)]
    L = [[1 if i == j else 0 for j in range(4)] for i in range(4)]
    p.write_text(json.dumps({"g": 4, "P": P, "Lambda": L}))
    res = run("divisor", p, "--out", tmp_path / "m.json")
    assert res.exit_code == 2


# ------------------------------------------------------------------ export


def test_export_svg_matches_direct_export(tmp_path):
    mesh = tmp_path / "mesh.json"
    run("divisor", FIXTURES / "variety_g2.json", "--out", mesh)
    direct = tmp_path / "direct.svg"
    run("divisor", FIXTURES / "variety_g2.json", "--out", direct, "--format", "svg")
    res = run("export", mesh, "--format", "svg")
    assert res.exit_code == 0
    assert res.stdout.encode() == direct.read_bytes()


def test_export_json_roundtrips_bytes(tmp_path):
    mesh = tmp_path / "mesh.json"
    run("divisor", FIXTURES / "variety_g2.json", "--out", mesh)
    res = run("export", mesh, "--format", "json")
    assert res.exit_code == 0
    assert res.stdout.encode() == mesh.read_bytes()


def test_export_rejects_non_mesh_file():
    res = run("export", FIXTURES / "variety_g1.json", "--format", "json")
    assert res.exit_code == 2


# ------------------------------------------------------------ determinism


@pytest.mark.parametrize(
    "argv",
    [
        ("validate", FIXTURES / "variety_g2.json"),
        ("eval", FIXTURES / "theta_g1.json", "4/7", "-9/11", "22/13"),
        ("crosscheck", "A", FIXTURES / "series_g1.json"),
        ("crosscheck", "B", FIXTURES / "period_g1.json"),
        ("crosscheck", "C", FIXTURES / "level2_g1.json"),
    ],
    ids=["validate", "eval", "suite-a", "suite-b", "suite-c"],
)
def test_reports_are_byte_identical_across_runs(argv):
    first = run(*argv)
    second = run(*argv)
    assert first.exit_code == second.exit_code == 0
    assert first.stdout == second.stdout


def test_meshes_are_byte_identical_across_runs(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    r1 = run("divisor", FIXTURES / "variety_g2.json", "--out", a)
    r2 = run("divisor", FIXTURES / "variety_g2.json", "--out", b)
    assert r1.exit_code == r2.exit_code == 0
    assert a.read_bytes() == b.read_bytes()
    assert r1.stdout == r2.stdout
