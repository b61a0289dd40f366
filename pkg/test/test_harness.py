from unittest.mock import patch

from src.coherelab.config import LabConfig, SuiteConfig
from src.coherelab.errors import InvalidInput, NumericalFailure
from src.coherelab.harness import (
    FAIL,
    INCONCLUSIVE,
    KNOWN_VIOLATION,
    PASS,
    MonotonicityHarness,
    SuiteSummary,
    random_io_kraus,
    trial_seeds,
)
from src.coherelab.measures import MeasureResult, get_measure
from src.coherelab.states import DensityMatrix, SioChannel, random_density, random_sio
import numpy as np
import pytest


@pytest.fixture
def harness():
    return MonotonicityHarness(config=LabConfig(threads=2))


@pytest.fixture
def small_suite():
    return SuiteConfig(
        dimensions=(2, 3),
        trials=2,
        seed=11,
        measures=("c_nabla_inf", "c_fisher_2", "c_chernoff_inf"),
        check_bounds=False,
    )


def test_identity_channel_has_zero_slack(harness):
    rho = random_density(3, 2, 5)
    report = harness.check_strong_monotonicity("c_nabla_inf", rho, SioChannel.identity(3))
    assert report.status == PASS
    assert report.slack == pytest.approx(0.0, abs=1e-12)
    assert report.branches == 1


def test_dephasing_channel_leaves_nothing_on_the_right(harness):
    rho = random_density(3, 3, 6)
    report = harness.check_strong_monotonicity("c_fisher_2", rho, SioChannel.dephasing(3))
    assert report.rhs == pytest.approx(0.0, abs=1e-12)
    assert report.slack == pytest.approx(report.lhs)
    assert report.passed


def test_random_channels_pass(harness):
    for seed in range(5):
        rho = random_density(3, 1 + seed % 3, seed)
        channel = random_sio(3, 1 + seed % 3, 500 + seed)
        for name in ("c_nabla_inf", "c_fisher_inf", "c_chernoff_2"):
            assert harness.check_strong_monotonicity(name, rho, channel).passed


def test_non_monotone_measure_is_rejected(harness):
    with pytest.raises(InvalidInput):
        harness.check_strong_monotonicity("c_l1", DensityMatrix.qubit_plus(), SioChannel.identity(2))
    with pytest.raises(InvalidInput):
        harness.run_suite(SuiteConfig(measures=("c_rel_ent",)))
    with pytest.raises(InvalidInput):
        harness.run_suite(SuiteConfig(measures=("c_unknown",)))


def test_solver_failure_is_inconclusive(harness):
    with patch(
        "src.coherelab.harness.evaluate",
        side_effect=NumericalFailure("barrier stalled", {"iterations": 2001}),
    ):
        report = harness.check_strong_monotonicity(
            "c_guess", DensityMatrix.qubit_plus(), SioChannel.identity(2)
        )
    assert report.status == INCONCLUSIVE
    assert report.message == "barrier stalled"
    assert np.isnan(report.slack)


def test_violation_is_resolved_then_reported(harness):
    """
    A violation triggers one re-solve at higher effort before the failure
    is reported together with the reproduction data.
    """
    rho = random_density(2, 2, 0)
    calls = []

    def fake_evaluate(name, state, boost=1):
        calls.append(boost)
        return MeasureResult(0.0 if state is rho else 1.0)

    with patch("src.coherelab.harness.evaluate", side_effect=fake_evaluate):
        report = harness.check_strong_monotonicity("c_max", rho, SioChannel.dephasing(2))
    assert report.status == FAIL
    assert report.resolved
    assert report.slack == pytest.approx(-1.0)
    assert 10 in calls
    assert report.reproduction["state"]["dim"] == 2
    assert len(report.reproduction["kraus"]) == 2


def test_trial_seeds_are_deterministic():
    assert trial_seeds(0, 3, 1) == trial_seeds(0, 3, 1)
    assert trial_seeds(0, 3, 1) != trial_seeds(0, 3, 2)
    assert trial_seeds(0, 3, 1) != trial_seeds(1, 3, 1)


def test_random_io_kraus_is_complete():
    ops = random_io_kraus(3, 2, 4)
    total = sum(k.conj().T @ k for k in ops)
    assert np.allclose(total, np.eye(3), atol=1e-10)


def test_run_suite_is_reproducible(small_suite):
    first = MonotonicityHarness(config=LabConfig(threads=1)).run_suite(small_suite)
    second = MonotonicityHarness(config=LabConfig(threads=4)).run_suite(small_suite)
    assert first.to_dict() == second.to_dict()
    summary = first.summary()
    assert summary["total"] == 2 * 2 * 3
    assert summary["failed"] == 0
    assert set(summary["per_measure"]) == set(small_suite.measures)
    assert "timings" not in first.to_dict()
    assert "timings" in first.to_dict(include_timings=True)


def test_run_suite_with_io_exploration(harness):
    cfg = SuiteConfig(dimensions=(2,), trials=2, seed=3, measures=("c_max",), check_bounds=False, explore_io=True)
    summary = harness.run_suite(cfg)
    assert len(summary.exploratory) == 2
    assert summary.failures == []


def test_empty_measure_list_gives_empty_summary(harness):
    summary = harness.run_suite(SuiteConfig(measures=()))
    assert summary.reports == []
    assert summary.summary()["total"] == 0


def test_bounds_on_qubit_and_diagonal_states(harness):
    report = harness.check_bounds(random_density(2, 2, 8))
    assert report.passed, report.worst
    assert "qubit_fisher_2_eq_l1_squared" in report.slacks

    report = harness.check_bounds(DensityMatrix.diagonal([0.2, 0.3, 0.5]))
    assert report.passed
    assert all(v == pytest.approx(0.0, abs=1e-9) for v in report.values.values())


def test_suite_runs_bounds(harness):
    cfg = SuiteConfig(dimensions=(3,), trials=2, seed=1, measures=("c_nabla_inf",), check_bounds=True)
    summary = harness.run_suite(cfg)
    assert len(summary.bounds) == 2
    assert summary.bound_failures == []


STRONG_MONOTONES = [
    "c_max", "c_guess", "c_nabla_inf", "c_nabla_2",
    "c_fisher_inf", "c_fisher_2", "c_chernoff_inf", "c_chernoff_2",
]


@pytest.mark.parametrize("name", STRONG_MONOTONES)
@pytest.mark.parametrize("d", [2, 3, 4])
def test_strong_monotonicity_on_suite_trials(harness, name, d):
    allowed = {PASS} if get_measure(name).monotonicity_proven else {PASS, KNOWN_VIOLATION}
    for trial in range(3):
        state_seed, channel_seed = trial_seeds(0, d, trial)
        rho = random_density(d, 1 + state_seed % d, state_seed)
        channel = random_sio(d, 1 + channel_seed % 3, channel_seed)
        report = harness.check_strong_monotonicity(
            name, rho, channel, state_seed=state_seed, channel_seed=channel_seed
        )
        assert report.status in allowed, report.to_dict()


@pytest.mark.parametrize("state_seed, channel_seed", [
    (199879475, 1464315463),
    (1187908452, 1041175630),
])
def test_commutator_two_norm_known_violations(harness, state_seed, channel_seed):
    """
    With the 2-norm constraint the optimal Hamiltonian of the input is not
    shared by the branches, and these d = 4 trials lose monotonicity even
    after the re-solve. They are reported as known violations.
    """
    rho = random_density(4, 1 + state_seed % 4, state_seed)
    channel = random_sio(4, 1 + channel_seed % 3, channel_seed)
    report = harness.check_strong_monotonicity(
        "c_nabla_2", rho, channel, state_seed=state_seed, channel_seed=channel_seed
    )
    assert report.status == KNOWN_VIOLATION
    assert report.resolved
    assert report.slack < -5e-4
    assert report.reproduction["state"]["dim"] == 4


def test_known_violation_does_not_count_as_failure(harness):
    rho = random_density(2, 2, 0)

    def fake_evaluate(name, state, boost=1):
        return MeasureResult(0.0 if state is rho else 1.0)

    with patch("src.coherelab.harness.evaluate", side_effect=fake_evaluate):
        report = harness.check_strong_monotonicity("c_nabla_2", rho, SioChannel.dephasing(2))
    assert report.status == KNOWN_VIOLATION
    assert report.reproduction is not None

    summary = SuiteSummary(config=SuiteConfig(measures=("c_nabla_2",)), reports=[report])
    assert summary.failures == []
    assert summary.summary()["known_violations"] == 1
    assert summary.per_measure()["c_nabla_2"]["known_violations"] == 1


def test_bounds_solver_failure_is_inconclusive(harness):
    with patch(
        "src.coherelab.harness.evaluate",
        side_effect=NumericalFailure("barrier stalled", {"iterations": 2001}),
    ):
        report = harness.check_bounds(random_density(3, 2, 4))
        summary = harness.run_suite(
            SuiteConfig(dimensions=(2,), trials=1, seed=0, measures=("c_guess",), check_bounds=True)
        )
    assert report.inconclusive
    assert not report.passed
    assert report.message == "barrier stalled"
    assert summary.bound_failures == []
    assert summary.summary()["bounds_inconclusive"] == 1
    assert summary.summary()["inconclusive"] == 1


def test_suite_tolerance_stays_local(harness):
    cfg = SuiteConfig(dimensions=(2,), trials=1, seed=0, measures=("c_nabla_inf",), tolerance=0.25, check_bounds=True)
    summary = harness.run_suite(cfg)
    assert summary.reports[0].tolerance == 0.25
    assert summary.bounds[0].tolerance == 0.25
    assert harness.tolerance == 1e-6

    report = harness.check_strong_monotonicity("c_nabla_inf", random_density(2, 2, 1), SioChannel.identity(2))
    assert report.tolerance == 1e-6
