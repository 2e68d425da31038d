import json

import pytest

from sawlab.cli import main as cli_main


def test_enumerate_json_schema(cli):
    code, out = cli("enumerate", "--family", "tree:3", "--n", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "saw-series/1"
    assert doc["family"] == "tree:3"
    assert doc["counts"] == ["1", "3", "6", "12"]
    assert doc["truncated"] is False
    assert doc["manifest"]["tool"] == "sawlab"
    assert "threads" not in doc["manifest"]["parameters"]


def test_enumerate_csv(cli):
    code, out = cli("enumerate", "--family", "loop:4", "--n", "3",
                    "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["n,count", "0,1", "1,4", "2,6", "3,12"]


def test_enumerate_with_root(cli):
    code, out = cli("enumerate", "--family", "ladder", "--n", "2",
                    "--root", "3,1")
    assert code == 0
    doc = json.loads(out)
    assert doc["root"] == "3,1"
    assert doc["counts"] == ["1", "3", "6"]


def test_enumerate_avoid_edge_flag(cli):
    code, out = cli("enumerate", "--family", "tree:3", "--n", "2",
                    "--avoid-edge", "root~0#0")
    assert code == 0
    doc = json.loads(out)
    assert doc["kind"] == "avoiding"
    assert doc["counts"] == ["1", "2", "4"]
    assert doc["avoided_edge"] == "root~0#0"


def test_enumerate_mid_edge_flag(cli):
    code, out = cli("enumerate", "--family", "tree:3", "--n", "1",
                    "--mid-edge", "root~0#0")
    assert code == 0
    assert json.loads(out)["counts"] == ["1", "2"]


def test_enumerate_extendable_flag(cli):
    code, out = cli("enumerate", "--family", "decor3", "--n", "6",
                    "--extendable", "10")
    assert code == 0
    doc = json.loads(out)
    assert doc["kind"] == "extendable"
    assert doc["extendable_lookahead"] == 10
    plain = json.loads(cli("enumerate", "--family", "decor3", "--n", "6")[1])
    assert int(doc["counts"][6]) < int(plain["counts"][6])


def test_enumerate_flags_are_exclusive(cli):
    code, _ = cli("enumerate", "--family", "tree:3", "--n", "2",
                  "--avoid-edge", "root~0#0", "--extendable", "4")
    assert code == 2


def test_usage_errors_exit_two(cli):
    assert cli("enumerate", "--family", "klein", "--n", "3")[0] == 2
    assert cli("enumerate", "--family", "ladder", "--n", "2",
               "--root", "zebra")[0] == 2
    assert cli("enumerate", "--family", "ladder", "--n", "2",
               "--avoid-edge", "junk")[0] == 2
    assert cli("check", "--family", "ladder", "bounds", "--format", "csv")[0] == 2


def test_budget_truncation_exits_three(cli):
    code, out = cli("enumerate", "--family", "hex", "--n", "14",
                    "--budget", "1000")
    assert code == 3
    assert json.loads(out)["truncated"] is True


def test_estimate_truncated_exits_three(cli):
    code, out = cli("estimate", "--family", "hex", "--n", "14",
                    "--budget", "500")
    assert code == 3
    assert out == ""


def test_estimate_json_schema(cli):
    code, out = cli("estimate", "--family", "loop:3", "--n", "20")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "growth-estimate/1"
    assert doc["method"] == "ratio_extrapolation"
    assert abs(doc["mu_hat"] - 2**0.5) < 1e-6
    assert abs(doc["mu_exact"] - 2**0.5) < 1e-15
    assert len(doc["fekete_upper"]) == 20
    assert all("/" in r for r in doc["ratios"])
    assert {"lower_bound", "upper_bound", "strict_gap"} <= set(doc["clauses"])


def test_estimate_csv(cli):
    code, out = cli("estimate", "--family", "tree:3", "--n", "10",
                    "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,sup_count,fekete_upper"
    assert lines[1] == "0,1,"
    assert lines[2].startswith("1,3,")
    assert len(lines) == 12


def test_estimate_log_fit_method(cli):
    code, out = cli("estimate", "--family", "tree:3", "--n", "12",
                    "--method", "log_fit")
    assert code == 0
    assert abs(json.loads(out)["mu_hat"] - 2.0) < 0.05


def test_check_pi_certified_and_violation(cli):
    code, out = cli("check", "--family", "loop:4", "pi")
    assert code == 0
    doc = json.loads(out)
    assert doc["outcome"] == "certified"
    assert doc["bounds"] == {"L": 8, "D": 12, "P": 12}

    code, out = cli("check", "--family", "decor3", "pi", "--L", "10")
    assert code == 1
    doc = json.loads(out)
    assert doc["outcome"] == "violation"
    assert doc["violation"]["unmatched_red"]


def test_check_pi_violation_payload_revalidates(cli):
    # the certificate carries enough to recheck the verdicts independently
    from sawlab.graphs import parse_family
    from sawlab.redblue import TraversedTriple, classify_edge

    _, out = cli("check", "--family", "decor3", "pi", "--L", "10")
    doc = json.loads(out)
    rule = parse_family("decor3")
    v = doc["violation"]
    verts = tuple(rule.parse_vertex(s) for s in v["prefix"])
    edges = tuple(rule.parse_edge(s) for s in v["prefix_edges"])
    triple = TraversedTriple(verts, edges, rule.parse_edge(v["leaving"]))
    for red in v["unmatched_red"]:
        verdict = classify_edge(rule, triple, rule.parse_edge(red),
                                doc["bounds"]["D"])
        assert verdict.status == "red"


def test_check_bounds(cli):
    code, out = cli("check", "--family", "hex", "bounds", "--n", "14")
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_check_menger(cli):
    code, out = cli("check", "--family", "tree:3", "menger", "--n", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["expect_full_flow"] is True
    assert all(r["flow"] == 3 for r in doc["results"])

    code, out = cli("check", "--family", "decor3", "menger", "--n", "3")
    assert code == 0  # hypothesis does not apply, deficit is informational
    doc = json.loads(out)
    assert doc["expect_full_flow"] is False


def test_check_strictness(cli):
    code, out = cli("check", "--family", "hex", "strictness",
                    "--series-n", "14")
    assert code == 0
    doc = json.loads(out)
    assert doc["cutoff"] == 6
    assert abs(doc["bound"] - 63 ** (1 / 6)) < 1e-12
    assert doc["ok"] is True
    assert all(int(v) <= 63 for v in doc["pair_counts"].values())


def test_check_strictness_not_witnessed_on_tree(cli):
    code, out = cli("check", "--family", "tree:3", "strictness", "--n", "8")
    assert code == 3
    assert json.loads(out)["note"] == "strictness not witnessed at this bound"


def test_check_lemmas(cli):
    code, out = cli("check", "--family", "loop:3", "lemmas", "--n", "8")
    assert code == 0
    doc = json.loads(out)
    assert doc["branch_induction"]["counterexamples"] == []
    assert doc["neighbor_decomposition"]["failures"] == []
    assert doc["submultiplicativity"]["failures"] == []


def test_out_flag_writes_file(cli, tmp_path):
    target = tmp_path / "series.json"
    code, out = cli("enumerate", "--family", "tree:3", "--n", "2",
                    "--out", str(target))
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text())["counts"] == ["1", "3", "6"]


@pytest.mark.parametrize("argv", [
    ("enumerate", "--family", "hex", "--n", "12"),
    ("enumerate", "--family", "loop:5", "--n", "14"),
    ("estimate", "--family", "ladder", "--n", "16"),
    ("check", "--family", "loop:3", "pi"),
])
def test_outputs_byte_identical_across_threads(cli, argv):
    outputs = {cli(*argv, "--threads", str(t))[1] for t in (1, 4, 8)}
    assert len(outputs) == 1
    assert outputs.pop() == cli(*argv)[1]


def test_stderr_manifest_has_wall_time(capsys):
    code = cli_main(["enumerate", "--family", "tree:3", "--n", "2"])
    assert code == 0
    err = capsys.readouterr().err
    info = json.loads(err.strip().splitlines()[-1])
    assert "wall_time_s" in info and "argv" in info
