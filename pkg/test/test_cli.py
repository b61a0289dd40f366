from unittest.mock import patch

from src.coherelab.cli import EXIT_INVALID, EXIT_MONOTONICITY, EXIT_OK, EXIT_SOLVER, main
from src.coherelab.config import SuiteConfig
from src.coherelab.errors import NumericalFailure
from src.coherelab.harness import FAIL, KNOWN_VIOLATION, MonotonicityReport, SuiteSummary
import pytest
import json


@pytest.fixture
def suite_file(tmp_path):
    path = tmp_path / "suite.json"
    path.write_text(json.dumps({
        "dimensions": [2],
        "trials": 2,
        "seed": 5,
        "measures": ["c_nabla_inf"],
        "tolerance": 1e-6,
        "check_bounds": False,
    }))
    return path


def test_measure_single_value(capsys):
    assert main(["measure", "--state", "qubit_plus.json", "--only", "c_l1"]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["c_l1"]["value"] == 1.0
    assert out["c_l1"]["witness"] == {"kind": "closed_form"}


def test_measure_csv_to_file(tmp_path):
    out = tmp_path / "values.csv"
    code = main([
        "measure", "--state", "qutrit_example.json", "--only", "c_l1,c_max",
        "--format", "csv", "--out", str(out),
    ])
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "measure,value"
    assert lines[1] == "c_l1,0.666666666667"
    assert lines[2].startswith("c_max,0.66666666")


def test_measure_invalid_inputs(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("[[1, 0], [0")
    assert main(["measure", "--state", str(broken)]) == EXIT_INVALID
    assert main(["measure", "--state", "qubit_plus.json", "--only", "c_nope"]) == EXIT_INVALID

    not_psd = tmp_path / "not_psd.json"
    not_psd.write_text(json.dumps({"dim": 2, "matrix": [[1.2, 0.0], [0.0, -0.2]]}))
    assert main(["measure", "--state", str(not_psd)]) == EXIT_INVALID


def test_measure_solver_failure_exit_code():
    with patch("src.coherelab.lab.evaluate", side_effect=NumericalFailure("no convergence")):
        assert main(["measure", "--state", "qubit_plus.json", "--only", "robustness"]) == EXIT_SOLVER


def test_missing_required_argument_exits_two():
    with pytest.raises(SystemExit) as info:
        main(["measure"])
    assert info.value.code == 2


def test_random_state_is_deterministic(capsys, tmp_path):
    assert main(["random-state", "-d", "3", "--rank", "2", "--seed", "4"]) == EXIT_OK
    first = capsys.readouterr().out
    assert main(["random-state", "-d", "3", "--rank", "2", "--seed", "4"]) == EXIT_OK
    assert capsys.readouterr().out == first
    assert json.loads(first)["dim"] == 3

    out = tmp_path / "state.json"
    assert main(["random-state", "-d", "3", "--maximally-coherent", "--out", str(out)]) == EXIT_OK
    assert main(["measure", "--state", str(out), "--only", "c_l1"]) == EXIT_OK


def test_pattern_sweep_csv(capsys):
    assert main(["pattern", "--state", "qutrit_example.json", "--povm", "fourier", "--sweep"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "alpha_1,alpha_2,alpha_3,p_0,p_1,p_2,row_sum"
    assert len(lines) == 1 + 33


def test_pattern_rejects_bad_povm():
    assert main(["pattern", "--state", "qubit_plus.json", "--povm", "basis:[[1, 0]]"]) == EXIT_INVALID


def test_suite_writes_report(suite_file, tmp_path):
    out = tmp_path / "report.json"
    assert main(["suite", "--config", str(suite_file), "--out", str(out)]) == EXIT_OK
    report = json.loads(out.read_text())
    assert report["summary"]["total"] == 2
    assert "timings" not in report


def test_suite_failure_exit_code(suite_file):
    cfg = SuiteConfig.from_file(str(suite_file))
    failing = MonotonicityReport(
        measure="c_nabla_inf", dim=2, lhs=0.1, rhs=0.2, slack=-0.1,
        status=FAIL, tolerance=1e-6, state_seed=1, channel_seed=2,
    )
    summary = SuiteSummary(config=cfg, reports=[failing])
    with patch("src.coherelab.harness.MonotonicityHarness.run_suite", return_value=summary):
        assert main(["suite", "--config", str(suite_file)]) == EXIT_MONOTONICITY


def test_known_violation_keeps_exit_zero(suite_file, capsys):
    cfg = SuiteConfig.from_file(str(suite_file))
    known = MonotonicityReport(
        measure="c_nabla_2", dim=4, lhs=0.315, rhs=0.319, slack=-0.004,
        status=KNOWN_VIOLATION, tolerance=1e-6, state_seed=1, channel_seed=2,
    )
    summary = SuiteSummary(config=cfg, reports=[known])
    with patch("src.coherelab.harness.MonotonicityHarness.run_suite", return_value=summary):
        assert main(["suite", "--config", str(suite_file)]) == EXIT_OK
    captured = capsys.readouterr()
    assert "KNOWN c_nabla_2 d=4" in captured.err
    assert json.loads(captured.out)["summary"]["known_violations"] == 1


def test_unwritable_output_path(tmp_path):
    out = tmp_path / "missing_dir" / "values.json"
    assert main(["measure", "--state", "qubit_plus.json", "--only", "c_l1", "--out", str(out)]) == EXIT_INVALID
    assert main(["random-state", "-d", "2", "--seed", "1", "--out", str(out)]) == EXIT_INVALID
