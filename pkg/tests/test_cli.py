import json

import pytest

from flowmcg.cli import run


@pytest.fixture
def tm_file(tmp_path):
    path = tmp_path / "tm.json"
    path.write_text(json.dumps({"alphabet": ["0", "1"], "rules": {"0": "01", "1": "10"}}))
    return str(path)


@pytest.fixture
def fib_file(tmp_path):
    path = tmp_path / "fib.json"
    path.write_text(json.dumps({"alphabet": ["0", "1"], "rules": {"0": "01", "1": "0"}}))
    return str(path)


def run_json(capsys, argv):
    assert run(argv) == 0
    return json.loads(capsys.readouterr().out)


def test_analyze_reports_the_full_structure(capsys, tm_file):
    payload = run_json(capsys, ["analyze", tm_file, "--aut-radius", "1"])
    assert payload["mcg"] == {"finite_part": "Z/2", "z_part": "Z", "product": "direct"}
    assert payload["lambda"]["minpoly"] == [-2, 1]
    assert payload["cr"] == "ExactCR"
    assert payload["z_part"]["relation"] == [1, 1]


def test_language_lists_blocks(capsys, tm_file):
    payload = run_json(capsys, ["language", tm_file, "--n", "3"])
    assert payload["count"] == 6
    assert "000" not in payload["blocks"]
    assert "010" in payload["blocks"]


def test_complexity_values(capsys, tm_file):
    payload = run_json(capsys, ["complexity", tm_file, "--n-max", "5"])
    assert payload["complexity"] == {"1": 2, "2": 4, "3": 6, "4": 10, "5": 12}


def test_pf_output_is_deterministic(capsys, fib_file):
    first = run_json(capsys, ["pf", fib_file])
    second = run_json(capsys, ["pf", fib_file])
    assert first == second
    assert first["lambda"]["minpoly"] == [-1, -1, 1]


def test_cr_verdict(capsys, fib_file):
    payload = run_json(capsys, ["cr", fib_file])
    assert payload["verdict"] == "ProvedCR"
    assert payload["pisot"] is True


def test_coinvariants_summary(capsys, tm_file):
    payload = run_json(capsys, ["coinvariants", tm_file])
    assert payload["free_rank"] == 2
    assert payload["invariant_factors"] == [1, 4]
    assert payload["trace_image"] == "Z[1/2]"


def test_asymptotics_json_and_dot(capsys, tm_file):
    payload = run_json(capsys, ["asymptotics", tm_file])
    assert payload["count"] == 2
    assert run(["asymptotics", tm_file, "--dot"]) == 0
    assert "cluster_0" in capsys.readouterr().out


def test_aut_search(capsys, tm_file):
    payload = run_json(capsys, ["aut", tm_file, "--radius", "0"])
    assert payload["quotient"] == {"order": 2, "name": "Z/2", "element_orders": [1, 2]}
    rules = [e["rule"] for e in payload["elements"]]
    assert {"0": "1", "1": "0"} in rules


def test_induce_reports_exact_measures(capsys, fib_file):
    payload = run_json(capsys, ["induce", fib_file, "--word", "1"])
    assert payload["returns"] == ["100", "10"]
    assert payload["return_times"] == [3, 2]
    assert "exact" in payload["kac_identity"]


def test_flowcode_rmu(capsys, fib_file):
    payload = run_json(capsys, ["flowcode", "rmu", fib_file, "--kind", "tilde"])
    assert payload["lambda_relation"] == {"p": 1, "q": 1}
    assert payload["r_mu"]["coeffs"] == ["0", "1"]


def test_flowcode_automorphism_needs_a_map(capsys, tm_file):
    assert run(["flowcode", "rmu", tm_file, "--kind", "automorphism"]) == 1
    payload = run_json(
        capsys,
        ["flowcode", "rmu", tm_file, "--kind", "automorphism", "--map", '{"0": "1", "1": "0"}'],
    )
    assert payload["r_mu"]["coeffs"] == ["1"]


def test_sturmian_verdicts(capsys):
    golden = run_json(capsys, ["sturmian", "--surd", "(1,-1,5,2)"])
    assert golden["verdict"] == "IsomorphicToZ"
    trivial = run_json(capsys, ["sturmian", "--surd", "(-1,5,5,10)"])
    assert trivial["verdict"] == "TrivialMCG"
    assert trivial["minpoly"] == [1, -5, 5]


def test_odometer_unit_rank(capsys):
    payload = run_json(capsys, ["odometer", "--period", "2,3"])
    assert payload["unit_rank"] == 2
    assert run(["odometer", "--period", "6"]) == 1


def test_hierarchical_tables(capsys):
    payload = run_json(capsys, ["hierarchical", "--n", "2,2", "--tables", "3"])
    assert payload["words0"][1] == "001"
    assert payload["tables"]["involution_action"] == [1, 0]


def test_checklist_on_a_file(capsys, fib_file):
    payload = run_json(capsys, ["checklist", fib_file, "--n-max", "16"])
    assert payload["ergodic_measure_bound"] == 1


def test_out_flag_writes_a_file(tmp_path, fib_file):
    target = tmp_path / "report.json"
    assert run(["pf", fib_file, "--out", str(target)]) == 0
    assert json.loads(target.read_text())["lambda"]["minpoly"] == [-1, -1, 1]


def test_validation_failures_exit_one(tmp_path):
    assert run(["analyze", str(tmp_path / "missing.json")]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("not json")
    assert run(["analyze", str(bad)]) == 1
    periodic = tmp_path / "periodic.json"
    periodic.write_text(json.dumps({"alphabet": ["0", "1"], "rules": {"0": "0", "1": "1"}}))
    assert run(["analyze", str(periodic)]) == 1
