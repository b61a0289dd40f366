"""
Largest difference of intensity: C_max(rho) = max_alpha 1/2 ||rho(alpha) - rho||_1.

The maximizing detector is always two-outcome, with M0 the projector on
the positive part of rho(alpha) - rho.
"""
from itertools import product
from typing import Optional
import scipy.optimize
import numpy as np

from ..base import get_logger
from ..interferometer import DEFAULT_POINTS, FALLBACK_POINTS, optimal_effect
from ..numerics import hermitian_trace_norms
from ..states import TWO_PI, DensityMatrix, PhaseVector, Povm, apply_phases
from .types import BATCH, MeasureResult


logger = get_logger("coherelab.measures")

REFINE_STARTS = 5
MAX_GRID = 20_000
RANDOM_CANDIDATES = 4_000
MAX_SIGN_DIM = 14


def _candidates(d: int, seed: Optional[int]) -> np.ndarray:
    """
    Coarse candidate set over the free phases alpha_1..alpha_{d-1}.

    Uniform grid (2 pi k / n) when it is small enough, otherwise random
    points; always includes every vector in {0, pi}^(d-1).
    """
    free = d - 1
    n = DEFAULT_POINTS.get(d, FALLBACK_POINTS)
    if n ** free <= MAX_GRID:
        axis = TWO_PI * np.arange(n) / n
        coarse = np.array(list(product(axis, repeat=free)))
    else:
        rng = np.random.default_rng(seed)
        coarse = rng.uniform(0, TWO_PI, size=(RANDOM_CANDIDATES, free))
    parts = [coarse]
    if free <= MAX_SIGN_DIM:
        parts.append(np.pi * np.array(list(product((0.0, 1.0), repeat=free))))
    return np.vstack(parts)


def _objective_batch(mat: np.ndarray, free_alphas: np.ndarray) -> np.ndarray:
    n = free_alphas.shape[0]
    alphas = np.hstack([free_alphas, np.zeros((n, 1))])
    phases = np.exp(1j * alphas)
    out = np.empty(n)
    for start in range(0, n, BATCH):
        ph = phases[start:start + BATCH]
        factor = ph[:, :, None] * ph.conj()[:, None, :] - 1.0
        out[start:start + BATCH] = 0.5 * hermitian_trace_norms(mat[None] * factor)
    return out


def c_max(
    rho: DensityMatrix,
    *,
    restarts: int = REFINE_STARTS,
    seed: Optional[int] = 0
) -> MeasureResult:
    """
    Global maximization of 1/2 ||U(alpha) rho U(alpha)^dagger - rho||_1.

    Parameters
    ----------
    rho : DensityMatrix
        State to evaluate.
    restarts : int, default=5
        Number of best coarse candidates refined by Nelder-Mead.
    seed : int, optional
        Seed for the random candidate set used when d > 4.

    Returns
    -------
    MeasureResult
        Value and the optimal phase vector (gauge alpha_d = 0).
    """
    d = rho.dim
    if d == 1 or rho.is_diagonal():
        return MeasureResult(0.0, {"kind": "phases", "alpha": np.zeros(d)}, {"restarts": 0})

    mat = rho.matrix
    cands = _candidates(d, seed)
    values = _objective_batch(mat, cands)
    order = np.argsort(-values, kind="stable")

    best_value = float(values[order[0]])
    best_free = cands[order[0]]

    def objective(x: np.ndarray) -> float:
        return -float(_objective_batch(mat, x[None, :])[0])

    picked, nfev = [], 0
    for i in order:
        if len(picked) >= restarts:
            break
        # skip near-duplicates of an already refined start
        if any(np.allclose(cands[i], cands[j]) for j in picked):
            continue
        picked.append(i)
        res = scipy.optimize.minimize(
            objective,
            cands[i],
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 2000 * d},
        )
        nfev += res.nfev
        if -res.fun > best_value + 1e-15:
            best_value, best_free = float(-res.fun), res.x

    alpha = np.mod(np.append(best_free, 0.0), TWO_PI)
    logger.debug(f"c_max: {cands.shape[0]} candidates, {len(picked)} refinements")
    return MeasureResult(
        value=best_value,
        witness={"kind": "phases", "alpha": alpha},
        diagnostics={
            "candidates": int(cands.shape[0]),
            "restarts": len(picked),
            "evaluations": int(nfev),
        },
    )


def max_difference_value(rho: DensityMatrix, alpha: PhaseVector) -> float:
    """1/2 ||rho(alpha) - rho||_1 at a single phase setting."""
    diff = apply_phases(rho, alpha).matrix - rho.matrix
    return float(0.5 * hermitian_trace_norms(diff[None])[0])


def optimal_two_outcome_povm(rho: DensityMatrix, alpha: PhaseVector) -> Povm:
    """
    Two-outcome detector (M0, 1 - M0) whose response difference between
    settings alpha and 0 equals 1/2 ||rho(alpha) - rho||_1.
    """
    diff = apply_phases(rho, alpha).matrix - rho.matrix
    return Povm.two_outcome(optimal_effect(diff))
