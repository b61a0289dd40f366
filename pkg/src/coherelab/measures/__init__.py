from .types import MeasureResult, Partition
from .baselines import c_l1, c_rel_ent, c_trace_dist
from .max_difference import c_max, max_difference_value, optimal_two_outcome_povm
from .robustness import c_guess, robustness
from .sensitivity import c_nabla_2, c_nabla_inf, commutator_set_membership_check
from .fisher import c_fisher_2, c_fisher_inf, fisher_info, fisher_quadratic_form
from .skew import c_chernoff_2, c_chernoff_inf, chernoff_pair_search, skew_quadratic_form, wigner_yanase
from .information import (
    Ensemble,
    c_I_lower,
    c_I_upper,
    default_information_witness,
    holevo_chi,
    phase_ensemble,
    pretty_good_measurement,
)
from .registry import MEASURES, SIO_MONOTONE, MeasureSpec, evaluate, get_measure

__all__ = [
    "MeasureResult",
    "Partition",
    "c_l1",
    "c_rel_ent",
    "c_trace_dist",
    "c_max",
    "max_difference_value",
    "optimal_two_outcome_povm",
    "robustness",
    "c_guess",
    "c_nabla_inf",
    "c_nabla_2",
    "commutator_set_membership_check",
    "fisher_info",
    "fisher_quadratic_form",
    "c_fisher_2",
    "c_fisher_inf",
    "wigner_yanase",
    "skew_quadratic_form",
    "c_chernoff_inf",
    "c_chernoff_2",
    "chernoff_pair_search",
    "Ensemble",
    "phase_ensemble",
    "holevo_chi",
    "pretty_good_measurement",
    "default_information_witness",
    "c_I_lower",
    "c_I_upper",
    "MEASURES",
    "SIO_MONOTONE",
    "MeasureSpec",
    "evaluate",
    "get_measure",
]
