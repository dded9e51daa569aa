import json

import pytest
from click.testing import CliRunner

from dirhyp.cli import main
from dirhyp.core import Digraph, dump_digraph, load_digraph
from dirhyp.families import realize


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def path_file(tmp_path):
    p = tmp_path / "path.txt"
    p.write_text(dump_digraph(Digraph(4, [(0, 1), (1, 2), (2, 3)])))
    return str(p)


def test_analyze_path_is_zero_hyperbolic(runner, path_file):
    res = runner.invoke(main, ["analyze", path_file])
    assert res.exit_code == 0, res.output
    rep = json.loads(res.output)
    assert rep["delta"]["thin_all"]["delta"] == 0
    assert rep["zero_hyperbolic"]["value"] is True
    assert rep["config"]["command"] == "analyze"


def test_reports_are_byte_identical(runner, path_file):
    for args in (["analyze", path_file], ["analyze", "--family", "ex7_4", "--n", "4"],
                 ["analyze", path_file, "--format", "tsv"]):
        first = runner.invoke(main, args)
        second = runner.invoke(main, args)
        assert first.exit_code == 0 and first.output == second.output


def test_analyze_family_reports_constants(runner):
    res = runner.invoke(main, ["analyze", "--family", "ex7_4", "--n", "4"])
    rep = json.loads(res.output)
    assert "divergence_k" in rep["constants"]
    sides = rep["delta"]["thin_all"]["witness_sides"]
    assert any(lab.startswith("x") for side in sides for lab in side)


def test_tsv_flattens(runner, path_file):
    res = runner.invoke(main, ["analyze", path_file, "--format", "tsv"])
    rows = dict(line.split("\t", 1) for line in res.output.splitlines())
    assert rows["delta.thin_all.delta"] == "0"


def test_parse_error_exits_with_usage_code(runner, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("3 2\n0 1\n1 9\n")
    res = runner.invoke(main, ["analyze", str(bad)])
    assert res.exit_code == 2 and "line 3" in res.output


def test_unknown_criterion_exits_2(runner):
    res = runner.invoke(main, ["verify", "--criterion", "AC99"])
    assert res.exit_code == 2


def test_verify_filters_and_prints_one_line(runner):
    res = runner.invoke(main, ["verify", "--criterion", "AC3"])
    assert res.exit_code == 0
    assert res.output.strip() == "AC3: PASS"


def test_family_export_round_trips(runner):
    res = runner.invoke(main, ["family", "export", "ex12_2", "--n", "3"])
    assert res.exit_code == 0
    assert load_digraph(res.output) == realize("ex12_2", 3).digraph
    assert runner.invoke(main, ["family", "export", "nope"]).exit_code == 2


def test_family_list(runner):
    res = runner.invoke(main, ["family", "list"])
    assert "ex16_5\t" in res.output and "presentations" in res.output


def test_qi_identity(runner, path_file, tmp_path):
    res = runner.invoke(main, ["qi", path_file, path_file, "--gamma", "1", "--c", "0"])
    assert res.exit_code == 0 and json.loads(res.output)["ok"] is True
    other = tmp_path / "edge.txt"
    other.write_text(dump_digraph(Digraph(4, [(0, 1)])))
    res = runner.invoke(main, ["qi", path_file, str(other), "--gamma", "1", "--c", "0"])
    assert res.exit_code == 1 and json.loads(res.output)["violation_count"] > 0


def test_diverge_on_path(runner, path_file):
    res = runner.invoke(main, ["diverge", path_file, "--r", "0,1"])
    assert res.exit_code == 0
    assert json.loads(res.output)["config"]["r"] == [0, 1]


def test_stability_labels(runner):
    res = runner.invoke(main, ["stability", "--family", "ex7_4", "--n", "4",
                               "--x", "x2", "--y", "y2"])
    assert res.exit_code == 0
    assert json.loads(res.output)["kappa_out"] is not None
    bad = runner.invoke(main, ["stability", "--family", "ex7_4", "--n", "4",
                               "--x", "nope", "--y", "y2"])
    assert bad.exit_code == 2


def test_boundary_ex12_2(runner):
    res = runner.invoke(main, ["boundary", "--family", "ex12_2"])
    assert res.exit_code == 0
    rep = json.loads(res.output)
    assert len(rep["boundary"]["classes"]) == 2 and len(rep["boundary"]["order"]) == 1
    assert len(rep["ends"]["classes"]) == 2
    no_rays = runner.invoke(main, ["boundary", "--family", "cayley_table"])
    assert no_rays.exit_code == 2


def test_boundary_rho_with_base(runner):
    res = runner.invoke(main, ["boundary", "--family", "ex14_2", "--base", "x0"])
    assert res.exit_code == 0
    rho = json.loads(res.output)["rho"]
    assert [m["window"] for m in rho] == [[5, 10], [10, 20]]
