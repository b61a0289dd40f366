"""
Name table of every coherence measure, shared by the CLI and the harness.
"""
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from ..errors import InvalidInput
from ..states import DensityMatrix
from .baselines import TRACE_DIST_STARTS, c_l1, c_rel_ent, c_trace_dist
from .fisher import c_fisher_2, c_fisher_inf
from .information import c_I_lower_default, c_I_upper
from .max_difference import REFINE_STARTS, c_max
from .robustness import MAX_ITER, c_guess, robustness
from .sensitivity import NABLA_RESTARTS, c_nabla_2, c_nabla_inf
from .skew import c_chernoff_2, c_chernoff_inf
from .types import MeasureResult


def _plain(fn: Callable[[DensityMatrix], float]) -> Callable[..., MeasureResult]:
    def wrapped(rho: DensityMatrix) -> MeasureResult:
        return MeasureResult(fn(rho), {"kind": "closed_form"}, {})
    wrapped.__name__ = fn.__name__
    wrapped.__doc__ = fn.__doc__
    return wrapped


@dataclass(frozen=True)
class MeasureSpec:
    """
    Registry entry.

    Attributes
    ----------
    name : str
        Public name used on the command line and in reports.
    function : callable
        rho -> MeasureResult.
    sio_monotone : bool
        Strongly monotone under SIO, so eligible for the monotonicity suite.
    optimizing : bool
        Result comes from an iterative or randomized search.
    boost_option : tuple of (str, int), optional
        Keyword and default of the effort knob that `evaluate(boost=...)`
        multiplies.
    monotonicity_proven : bool, default=True
        False when strong SIO monotonicity is claimed but has known
        counterexamples; the harness then reports violations as known
        rather than as failures.
    """
    name: str
    function: Callable[..., MeasureResult]
    sio_monotone: bool
    optimizing: bool
    boost_option: Optional[Tuple[str, int]] = None
    monotonicity_proven: bool = True


MEASURES: Dict[str, MeasureSpec] = {
    spec.name: spec for spec in (
        MeasureSpec("c_l1", _plain(c_l1), False, False),
        MeasureSpec("c_rel_ent", _plain(c_rel_ent), False, False),
        MeasureSpec("c_trace_dist", c_trace_dist, False, True, ("restarts", TRACE_DIST_STARTS)),
        MeasureSpec("c_max", c_max, True, True, ("restarts", REFINE_STARTS)),
        MeasureSpec("robustness", robustness, False, True, ("max_iter", MAX_ITER)),
        MeasureSpec("c_guess", c_guess, True, True, ("max_iter", MAX_ITER)),
        MeasureSpec("c_nabla_inf", c_nabla_inf, True, False),
        MeasureSpec("c_nabla_2", c_nabla_2, True, True, ("restarts", NABLA_RESTARTS), monotonicity_proven=False),
        MeasureSpec("c_fisher_inf", c_fisher_inf, True, False),
        MeasureSpec("c_fisher_2", c_fisher_2, True, False),
        MeasureSpec("c_chernoff_inf", c_chernoff_inf, True, False),
        MeasureSpec("c_chernoff_2", c_chernoff_2, True, False),
        MeasureSpec("c_I_upper", _plain(c_I_upper), False, False),
        MeasureSpec("c_I_lower", c_I_lower_default, False, False),
    )
}

SIO_MONOTONE: List[str] = [name for name, spec in MEASURES.items() if spec.sio_monotone]


def get_measure(name: str) -> MeasureSpec:
    try:
        return MEASURES[name]
    except KeyError:
        raise InvalidInput(f"Unknown measure {name!r}; choose from {', '.join(MEASURES)}")


def validate_names(names: Sequence[str]) -> List[str]:
    """Return `names` as a list, raising InvalidInput on the first unknown one."""
    return [get_measure(n).name for n in names]


def evaluate(name: str, rho: DensityMatrix, *, boost: int = 1) -> MeasureResult:
    """
    Evaluate measure `name` on `rho`.

    Parameters
    ----------
    name : str
        Registry name.
    rho : DensityMatrix
        State to evaluate.
    boost : int, default=1
        Multiplier on restarts (or the Newton budget) of optimizing
        measures. Closed-form measures ignore it.
    """
    spec = get_measure(name)
    if boost > 1 and spec.boost_option is not None:
        key, default = spec.boost_option
        return spec.function(rho, **{key: default * boost})
    return spec.function(rho)
