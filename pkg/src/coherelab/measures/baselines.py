"""
Baseline coherence measures from the resource-theory literature: the
l1-norm of coherence, the relative entropy of coherence and the trace
distance to the set of incoherent states.
"""
from typing import Optional
import scipy.optimize
import numpy as np

from ..base import get_logger
from ..numerics import trace_norm, von_neumann_entropy, shannon_entropy
from ..states import DensityMatrix
from .types import MeasureResult


logger = get_logger("coherelab.measures")

TRACE_DIST_STARTS = 10


def c_l1(rho: DensityMatrix) -> float:
    """Sum of the moduli of all off-diagonal entries."""
    mat = rho.matrix
    return float(np.abs(mat).sum() - np.abs(np.diag(mat)).sum())


def c_rel_ent(rho: DensityMatrix) -> float:
    """S(Delta(rho)) - S(rho), in bits."""
    value = shannon_entropy(rho.populations) - von_neumann_entropy(rho.matrix)
    return max(value, 0.0)


def _simplex_point(x: np.ndarray) -> np.ndarray:
    sq = x ** 2
    total = sq.sum()
    if total == 0:
        return np.full(x.size, 1.0 / x.size)
    return sq / total


def c_trace_dist(
    rho: DensityMatrix,
    *,
    restarts: int = TRACE_DIST_STARTS,
    seed: Optional[int] = 0
) -> MeasureResult:
    """
    Trace distance min over diagonal sigma of 1/2 ||rho - sigma||_1.

    Parameters
    ----------
    rho : DensityMatrix
        State to evaluate.
    restarts : int, default=10
        Number of Nelder-Mead starts. The first start is the dephased
        state, the others are uniformly random points of the simplex.
    seed : int, optional
        Seed for the random starts.

    Returns
    -------
    MeasureResult
        Value and the minimizing populations of sigma.

    Notes
    -----
    Populations are parametrized as p = x^2 / |x|^2, which keeps every
    Nelder-Mead iterate on the probability simplex.
    """
    mat = rho.matrix

    def objective(x: np.ndarray) -> float:
        return 0.5 * trace_norm(mat - np.diag(_simplex_point(x)))

    rng = np.random.default_rng(seed)
    starts = [np.sqrt(rho.populations)]
    starts += [np.sqrt(rng.dirichlet(np.ones(rho.dim))) for _ in range(max(0, restarts - 1))]

    best_value, best_x, nfev = objective(starts[0]), starts[0], 0
    for x0 in starts:
        if best_value == 0.0:
            break
        res = scipy.optimize.minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"xatol": 1e-11, "fatol": 1e-14, "maxiter": 4000 * rho.dim},
        )
        nfev += res.nfev
        if res.fun < best_value - 1e-15:
            best_value, best_x = float(res.fun), res.x

    logger.debug(f"c_trace_dist: {len(starts)} starts, {nfev} evaluations")
    return MeasureResult(
        value=max(best_value, 0.0),
        witness={"kind": "diagonal_state", "populations": _simplex_point(best_x)},
        diagnostics={"restarts": len(starts), "evaluations": nfev},
    )
