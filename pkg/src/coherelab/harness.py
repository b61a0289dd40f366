"""
Empirical checks of strong monotonicity under strictly incoherent
operations and of the inequality chains between coherence measures.
"""
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional, Sequence, Tuple
import time

import scipy.stats
import numpy as np

from .base import BaseRunner
from .config import LabConfig, SuiteConfig
from .errors import InvalidInput, NumericalFailure
from .measures import evaluate, get_measure
from .states import (
    DensityMatrix,
    SioChannel,
    apply_kraus,
    apply_sio,
    random_density,
    random_sio,
)
from .toolbox import state_to_dict


BRANCH_FLOOR = 1e-6
RESOLVE_BOOST = 10
BOUND_TOL = 1e-6

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
KNOWN_VIOLATION = "known_violation"


@dataclass
class MonotonicityReport:
    """
    One evaluation of C(rho) >= sum_l q_l C(rho_l).

    `status` is "pass" when slack >= -tolerance, "fail" otherwise, and
    "inconclusive" when a solver gave up. Violations of measures whose
    monotonicity has known counterexamples are "known_violation" instead
    of "fail". Failures and known violations carry the state and channel
    in `reproduction`.
    """
    measure: str
    dim: int
    lhs: float
    rhs: float
    slack: float
    status: str
    tolerance: float
    state_seed: Optional[int] = None
    channel_seed: Optional[int] = None
    branches: int = 0
    excluded_weight: float = 0.0
    resolved: bool = False
    message: Optional[str] = None
    reproduction: Optional[Dict[str, Any]] = None

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        if data["reproduction"] is None:
            del data["reproduction"]
        return data


@dataclass
class BoundsReport:
    """
    Slacks of the inequality chains on one state; pass iff all are >= -tolerance.

    A solver failure leaves the report inconclusive with empty slacks and
    the solver message.
    """
    dim: int
    values: Dict[str, float]
    slacks: Dict[str, float]
    tolerance: float
    state_seed: Optional[int] = None
    inconclusive: bool = False
    message: Optional[str] = None

    @property
    def passed(self) -> bool:
        return not self.inconclusive and all(s >= -self.tolerance for s in self.slacks.values())

    @property
    def worst(self) -> Tuple[Optional[str], float]:
        if not self.slacks:
            return None, 0.0
        name = min(self.slacks, key=self.slacks.get)
        return name, self.slacks[name]

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["passed"] = self.passed
        return data


@dataclass
class SuiteSummary:
    """Everything a suite run produced, ready for JSON export."""
    config: SuiteConfig
    reports: List[MonotonicityReport] = field(default_factory=list)
    bounds: List[BoundsReport] = field(default_factory=list)
    exploratory: List[MonotonicityReport] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def failures(self) -> List[MonotonicityReport]:
        return [r for r in self.reports if r.status == FAIL]

    @property
    def bound_failures(self) -> List[BoundsReport]:
        return [b for b in self.bounds if not b.inconclusive and not b.passed]

    @property
    def known_violations(self) -> List[MonotonicityReport]:
        return [r for r in self.reports if r.status == KNOWN_VIOLATION]

    def per_measure(self) -> Dict[str, Dict[str, Any]]:
        table: Dict[str, Dict[str, Any]] = {}
        for name in self.config.measures:
            rows = [r for r in self.reports if r.measure == name]
            if not rows:
                continue
            slacks = [r.slack for r in rows if r.status != INCONCLUSIVE]
            table[name] = {
                "trials": len(rows),
                "passed": sum(r.status == PASS for r in rows),
                "failed": sum(r.status == FAIL for r in rows),
                "known_violations": sum(r.status == KNOWN_VIOLATION for r in rows),
                "inconclusive": sum(r.status == INCONCLUSIVE for r in rows),
                "worst_slack": min(slacks) if slacks else None,
            }
        return table

    def summary(self) -> Dict[str, Any]:
        return {
            "total": len(self.reports),
            "passed": sum(r.status == PASS for r in self.reports),
            "failed": len(self.failures),
            "known_violations": len(self.known_violations),
            "inconclusive": sum(r.status == INCONCLUSIVE for r in self.reports),
            "bounds_checked": len(self.bounds),
            "bounds_failed": len(self.bound_failures),
            "bounds_inconclusive": sum(b.inconclusive for b in self.bounds),
            "exploratory_violations": sum(r.status in (FAIL, KNOWN_VIOLATION) for r in self.exploratory),
            "per_measure": self.per_measure(),
        }

    def to_dict(self, *, include_timings: bool = False) -> Dict[str, Any]:
        data = {
            "config": self.config.to_dict(),
            "reports": [r.to_dict() for r in self.reports],
            "bounds": [b.to_dict() for b in self.bounds],
            "exploratory": [r.to_dict() for r in self.exploratory],
            "summary": self.summary(),
        }
        if include_timings:
            data["timings"] = dict(self.timings)
        return data


def trial_seeds(master: int, d: int, trial: int) -> Tuple[int, int]:
    """(state seed, channel seed) of one trial, independent of execution order."""
    state_seed, channel_seed = np.random.SeedSequence([master, d, trial]).generate_state(2)
    return int(state_seed), int(channel_seed)


def random_io_kraus(d: int, n_kraus: int, seed: int) -> List[np.ndarray]:
    """
    Random incoherent (IO) Kraus set: a weight p of SIO branches plus
    measure-and-prepare branches |k_l><phi_l| whose targets k_l may repeat.

    {phi_l} is a Haar-random orthonormal basis, so the prepare branches
    alone complete to (1 - p) * identity.
    """
    rng = np.random.default_rng(seed)
    p = float(rng.uniform(0.2, 0.8))
    sio = random_sio(d, n_kraus, int(rng.integers(2 ** 32)))
    ops = [np.sqrt(p) * k for k in sio.kraus_operators()]
    basis = scipy.stats.unitary_group.rvs(d, random_state=rng) if d > 1 else np.eye(1)
    targets = rng.integers(0, d, size=d)
    for lam in range(d):
        prep = np.zeros((d, d), dtype=np.complex128)
        prep[targets[lam], :] = basis[:, lam].conj()
        ops.append(np.sqrt(1.0 - p) * prep)
    return ops


class MonotonicityHarness(BaseRunner):
    """
    Runs strong-monotonicity and inequality checks, one trial per thread.

    Parameters
    ----------
    config : LabConfig
        Thread cap, default seed and progress display.
    tolerance : float, default=1e-6
        Allowed negative slack.
    """

    logger_name = "coherelab.harness"

    def __init__(
        self,
        *,
        config: Optional[LabConfig] = None,
        tolerance: float = BOUND_TOL
    ):
        super().__init__(config=config or LabConfig())
        self.tolerance = tolerance

    def _weighted_rhs(self, name: str, branches, boost: int) -> Tuple[float, float]:
        rhs, excluded = 0.0, 0.0
        for q, out in branches:
            if q < BRANCH_FLOOR:
                excluded += q
                continue
            rhs += q * evaluate(name, out, boost=boost).value
        return rhs, excluded

    def _check(
        self,
        name: str,
        rho: DensityMatrix,
        branches,
        *,
        state_seed: Optional[int],
        channel_seed: Optional[int],
        reproduction: Dict[str, Any],
        tolerance: float
    ) -> MonotonicityReport:
        report = MonotonicityReport(
            measure=name, dim=rho.dim, lhs=np.nan, rhs=np.nan, slack=np.nan,
            status=INCONCLUSIVE, tolerance=tolerance,
            state_seed=state_seed, channel_seed=channel_seed, branches=len(branches),
        )
        try:
            lhs = evaluate(name, rho).value
            rhs, excluded = self._weighted_rhs(name, branches, 1)
            resolved = False
            if lhs - rhs < -tolerance:
                self.logger.info(f"{name}: slack {lhs - rhs:.3e} at d={rho.dim}, re-solving")
                lhs = evaluate(name, rho, boost=RESOLVE_BOOST).value
                rhs, excluded = self._weighted_rhs(name, branches, RESOLVE_BOOST)
                resolved = True
        except NumericalFailure as e:
            self.logger.warning(f"{name}: solver failure at d={rho.dim}: {e}")
            report.message = str(e)
            return report

        report.lhs, report.rhs, report.slack = lhs, rhs, lhs - rhs
        report.excluded_weight, report.resolved = excluded, resolved
        if report.slack >= -tolerance:
            report.status = PASS
            return report
        report.reproduction = reproduction
        if get_measure(name).monotonicity_proven:
            report.status = FAIL
        else:
            report.status = KNOWN_VIOLATION
            self.logger.warning(f"{name}: known violation, slack {report.slack:.3e} at d={rho.dim}")
        return report

    def check_strong_monotonicity(
        self,
        measure: str,
        rho: DensityMatrix,
        channel: SioChannel,
        *,
        state_seed: Optional[int] = None,
        channel_seed: Optional[int] = None,
        tolerance: Optional[float] = None
    ) -> MonotonicityReport:
        """
        Compare C(rho) with sum_l q_l C(rho_l) over the SIO branches.

        `tolerance` overrides the harness default for this check only.

        Raises
        ------
        InvalidInput
            If `measure` is unknown or not strongly SIO-monotone.
        """
        spec = get_measure(measure)
        if not spec.sio_monotone:
            raise InvalidInput(f"Measure {measure!r} is not a strong SIO monotone")
        reproduction = {
            "state": state_to_dict(rho),
            "kraus": [{"perm": list(p), "amplitudes": a} for p, a in channel.kraus],
        }
        return self._check(
            measure, rho, apply_sio(rho, channel),
            state_seed=state_seed, channel_seed=channel_seed, reproduction=reproduction,
            tolerance=self.tolerance if tolerance is None else tolerance,
        )

    def check_io_monotonicity(
        self,
        measure: str,
        rho: DensityMatrix,
        kraus_ops: Sequence[np.ndarray],
        *,
        state_seed: Optional[int] = None,
        channel_seed: Optional[int] = None,
        tolerance: Optional[float] = None
    ) -> MonotonicityReport:
        """Same comparison for an arbitrary incoherent Kraus set; exploratory only."""
        get_measure(measure)
        reproduction = {"state": state_to_dict(rho), "kraus": [np.asarray(k) for k in kraus_ops]}
        return self._check(
            measure, rho, apply_kraus(rho, kraus_ops),
            state_seed=state_seed, channel_seed=channel_seed, reproduction=reproduction,
            tolerance=self.tolerance if tolerance is None else tolerance,
        )

    def check_bounds(
        self,
        rho: DensityMatrix,
        *,
        state_seed: Optional[int] = None,
        tolerance: Optional[float] = None
    ) -> BoundsReport:
        """
        Evaluate the inequality chains on one state.

        C_tr <= C_max <= 2 C_tr, C_nabla^inf <= C_max, C_I lower <= C_I
        upper and C_guess = C_R / d for every d; for qubits additionally
        the closed-form identities between all measures. A solver failure
        gives an inconclusive report.
        """
        tol = self.tolerance if tolerance is None else tolerance
        names = [
            "c_l1", "c_trace_dist", "c_max", "robustness", "c_guess",
            "c_nabla_inf", "c_I_lower", "c_I_upper",
        ]
        if rho.dim == 2:
            names += ["c_nabla_2", "c_fisher_2", "c_fisher_inf", "c_chernoff_2", "c_chernoff_inf"]
        d = rho.dim
        try:
            v = {n: evaluate(n, rho).value for n in names}
        except NumericalFailure as e:
            self.logger.warning(f"bounds: solver failure at d={d}: {e}")
            return BoundsReport(
                dim=d, values={}, slacks={}, tolerance=tol, state_seed=state_seed,
                inconclusive=True, message=str(e),
            )
        slacks = {
            "trace_le_max": v["c_max"] - v["c_trace_dist"],
            "max_le_twice_trace": 2 * v["c_trace_dist"] - v["c_max"],
            "nabla_inf_le_max": v["c_max"] - v["c_nabla_inf"],
            "info_lower_le_upper": v["c_I_upper"] - v["c_I_lower"],
            "guess_eq_robustness_over_d": -abs(v["c_guess"] - v["robustness"] / d),
        }
        if d == 2:
            l1 = v["c_l1"]
            identities = {
                "qubit_max_eq_l1": (v["c_max"], l1),
                "qubit_robustness_eq_l1": (v["robustness"], l1),
                "qubit_max_eq_twice_trace": (v["c_max"], 2 * v["c_trace_dist"]),
                "qubit_nabla_inf_eq_max": (v["c_nabla_inf"], v["c_max"]),
                "qubit_nabla_2_eq_max_over_sqrt2": (v["c_nabla_2"], v["c_max"] / np.sqrt(2)),
                "qubit_fisher_2_eq_l1_squared": (v["c_fisher_2"], l1 ** 2),
                "qubit_fisher_inf_eq_twice_l1_squared": (v["c_fisher_inf"], 2 * l1 ** 2),
                "qubit_chernoff_inf_eq_twice_chernoff_2": (v["c_chernoff_inf"], 2 * v["c_chernoff_2"]),
            }
            slacks.update({k: -abs(a - b) for k, (a, b) in identities.items()})
        return BoundsReport(dim=d, values=v, slacks=slacks, tolerance=tol, state_seed=state_seed)

    def _trial_inputs(self, cfg: SuiteConfig, d: int, trial: int):
        state_seed, channel_seed = trial_seeds(cfg.seed, d, trial)
        rank = 1 + state_seed % d
        n_kraus = 1 + channel_seed % cfg.max_kraus
        rho = random_density(d, rank, state_seed)
        channel = random_sio(d, n_kraus, channel_seed)
        return rho, channel, state_seed, channel_seed, n_kraus

    def run_suite(self, cfg: SuiteConfig) -> SuiteSummary:
        """
        Run every (dimension, trial, measure) check of the suite.

        Trial inputs depend only on (seed, d, trial), so summaries are
        identical across runs and thread counts. An empty measure list
        gives an empty summary.

        Raises
        ------
        InvalidInput
            If a measure name is unknown or not SIO-monotone.
        """
        for name in cfg.measures:
            if not get_measure(name).sio_monotone:
                raise InvalidInput(f"Measure {name!r} is not a strong SIO monotone")
        summary = SuiteSummary(config=cfg)
        if not cfg.measures:
            return summary

        tasks = [(d, t, name) for d in cfg.dimensions for t in range(cfg.trials) for name in cfg.measures]

        def run_task(task) -> Tuple[MonotonicityReport, Optional[MonotonicityReport], float]:
            d, t, name = task
            start = time.perf_counter()
            rho, channel, s_seed, c_seed, n_kraus = self._trial_inputs(cfg, d, t)
            report = self.check_strong_monotonicity(
                name, rho, channel, state_seed=s_seed, channel_seed=c_seed,
                tolerance=cfg.tolerance,
            )
            io_report = None
            if cfg.explore_io:
                ops = random_io_kraus(d, n_kraus, c_seed)
                io_report = self.check_io_monotonicity(
                    name, rho, ops, state_seed=s_seed, channel_seed=c_seed,
                    tolerance=cfg.tolerance,
                )
            return report, io_report, time.perf_counter() - start

        results = self.map_parallel(run_task, tasks, description="Monotonicity suite")
        for (_, _, name), (report, io_report, elapsed) in zip(tasks, results):
            summary.reports.append(report)
            if io_report is not None:
                summary.exploratory.append(io_report)
            summary.timings[name] = summary.timings.get(name, 0.0) + elapsed

        if cfg.check_bounds:
            def run_bounds(trial_key) -> BoundsReport:
                d, t = trial_key
                rho, _, s_seed, _, _ = self._trial_inputs(cfg, d, t)
                return self.check_bounds(rho, state_seed=s_seed, tolerance=cfg.tolerance)

            keys = [(d, t) for d in cfg.dimensions for t in range(cfg.trials)]
            start = time.perf_counter()
            summary.bounds = self.map_parallel(run_bounds, keys, description="Inequality chains")
            summary.timings["bounds"] = time.perf_counter() - start

        for report in summary.failures:
            self.logger.error(
                f"{report.measure}: slack {report.slack:.3e} at d={report.dim} "
                f"(state seed {report.state_seed}, channel seed {report.channel_seed})"
            )
        for bound in summary.bound_failures:
            name, slack = bound.worst
            self.logger.error(f"bound {name} violated by {slack:.3e} (state seed {bound.state_seed})")
        for name, secs in summary.timings.items():
            self.logger.info(f"{name}: {secs:.2f}s")
        return summary
