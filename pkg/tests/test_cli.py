import json

import pytest

from symspin.cli import ConfigError, RunConfig, main
from symspin.reports import dumps


def run_json(args, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main(args + ["--out", str(out)])
    return code, json.loads(out.read_text()), out.read_bytes()


def statuses(report):
    return [r["status"] for r in report["records"]]


def test_decompose_l3_triangle(tmp_path):
    code, rep, _ = run_json(["decompose", "--l", "3"], tmp_path)
    assert code == 0
    adj = rep["artifacts"]["adjacency"]
    assert len(adj["nodes"]) == 16
    assert adj["columns"] == [1, 2, 3, 4, 3, 2, 1]
    assert [b for a, b in adj["arrows"] if a == [3, 3]] == [[4, 2]]
    assert all(r["status"] == "PASS" for r in rep["records"])


def test_decompose_l2_columns(tmp_path):
    _, rep, _ = run_json(["decompose", "--l", "2"], tmp_path)
    assert rep["artifacts"]["adjacency"]["columns"] == [1, 2, 3, 2, 1]
    assert rep["config"]["N"] == 10 and rep["config"]["B"] == 3


def test_verify_sigma_relations_suite(tmp_path):
    code, rep, _ = run_json(["verify", "--l", "2", "--max-deg", "10", "--seed", "7", "--suite", "sigma-relations"], tmp_path)
    assert code == 0
    assert statuses(rep) == ["PASS"] * 4


def test_verify_neighbours_zero_sigma(tmp_path):
    code, rep, _ = run_json(["verify", "--suite", "neighbours", "--sigma", "zero"], tmp_path)
    assert code == 0
    assert set(statuses(rep)) <= {"PASS", "VACUOUS"}
    assert "VACUOUS" in statuses(rep)


def test_verify_sigma_file(tmp_path, data_dir):
    code, rep, _ = run_json(["verify", "--suite", "neighbours", "--sigma", str(data_dir / "sigma" / "sigma_l2.json")],
                            tmp_path)
    assert code == 0
    assert "sigma_sha256" in rep["config"]


def test_sigma_file_wrong_l(tmp_path, data_dir, capsys):
    assert main(["verify", "--l", "3", "--sigma", str(data_dir / "sigma" / "sigma_l2.json")]) == 2


def test_complex_edges(tmp_path):
    code, rep, _ = run_json(["complex", "--l", "2", "--seed", "1", "--suite", "edges"], tmp_path)
    assert code == 0
    names = [r["name"] for r in rep["records"]]
    assert "edge-curvature-vanishing(i=0)[sigma 0]" in names
    probes = [r for r in rep["records"] if r["name"].startswith("middle-gap-probe(i=1)")]
    assert len(probes) == 5 and all(p["status"] == "FINDING" for p in probes)


def test_complex_zero_sigma(tmp_path):
    code, rep, _ = run_json(["complex", "--sigma", "zero", "--suite", "edges"], tmp_path)
    assert code == 0
    assert all(r["dims"]["nonzero"] == 0 for r in rep["records"])


def test_complex_closed_form_reports_both_signs(tmp_path):
    code, rep, _ = run_json(["complex", "--suite", "closed-form", "--sigma-samples", "1"], tmp_path)
    by_name = {r["name"]: r for r in rep["records"]}
    assert by_name["ricci-type-curvature-closed-form(plus)"]["status"] == "PASS"
    minus = by_name["ricci-type-curvature-closed-form(minus)"]
    assert minus["status"] == "FAIL" and "witness" in minus
    assert code == 1


def test_geometry_flat_all_pass(tmp_path, data_dir):
    code, rep, _ = run_json(["geometry", "--connection", str(data_dir / "connections" / "flat_l2.json")], tmp_path)
    assert code == 0
    assert set(statuses(rep)) == {"PASS"}


def test_geometry_constant(tmp_path, data_dir):
    code, rep, _ = run_json(["geometry", "--connection", str(data_dir / "connections" / "constant_l2.json")],
                            tmp_path)
    by_name = {r["name"]: r["status"] for r in rep["records"]}
    assert by_name["ricci-symmetric"] == "PASS"
    assert by_name["spinor-curvature(halved)"] == "PASS"
    assert by_name["spinor-curvature(stated)"] == "FAIL"
    assert code == 1


def test_geometry_broken_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"l": 2, "gamma": [
        {"k": 1, "a": 1, "b": 1, "monomials": [{"exps": [0, 0, 0, 0], "num": 1, "den": 1}]}]}))
    assert main(["geometry", "--connection", str(bad)]) == 2
    assert "(1, 1, 1)" in capsys.readouterr().err


@pytest.mark.parametrize("args", [
    ["verify", "--l", "1"],
    ["verify", "--max-deg", "6"],
    ["verify", "--suite", "nope"],
    ["geometry"],
    ["verify", "--sigma", "/nonexistent.json"],
])
def test_config_errors_exit_2(args, capsys):
    assert main(args) == 2
    assert "error" in capsys.readouterr().err


def test_bad_thread_count(monkeypatch):
    monkeypatch.setenv("SSL_THREADS", "zero")
    assert main(["verify", "--suite", "clifford"]) == 2


def test_run_config_invariants():
    with pytest.raises(ConfigError):
        RunConfig("verify", 2, 6, 3, 0, "all", "random", 5, None)
    RunConfig("verify", 2, 7, 3, 0, "all", "random", 5, None)


def test_reports_are_byte_identical(tmp_path, monkeypatch):
    args = ["complex", "--l", "2", "--seed", "3", "--suite", "edges"]
    _, _, a = run_json(args, tmp_path, "a.json")
    monkeypatch.setenv("SSL_THREADS", "4")
    _, _, b = run_json(args, tmp_path, "b.json")
    assert a == b


def test_seed_changes_report(tmp_path):
    _, _, a = run_json(["verify", "--suite", "sigma-relations", "--seed", "1"], tmp_path, "a.json")
    _, _, b = run_json(["verify", "--suite", "sigma-relations", "--seed", "2"], tmp_path, "b.json")
    assert a != b


def test_stdout_json(capsys):
    assert main(["verify", "--suite", "squares"]) == 0
    out = capsys.readouterr()
    rep = json.loads(out.out)
    assert rep["tool"]["name"] == "symspin"
    assert "PASS=2" in out.err


def test_dumps_sorted():
    assert dumps({"b": 1, "a": 2}) == '{\n  "a": 2,\n  "b": 1\n}\n'
