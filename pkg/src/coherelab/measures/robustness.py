"""
Robustness of coherence and the equidistributed-phase guessing measure.

1 + C_R(rho) = min tr delta  s.t.  delta >= rho, delta diagonal.

The program has only d scalar variables t (delta = diag(t)) and one d x d
linear matrix inequality, so it is solved with a primal log-barrier method
and damped Newton steps.
"""
from typing import Tuple
import scipy.linalg
import numpy as np

from ..base import get_logger
from ..errors import NumericalFailure
from ..numerics import eig_hermitian
from ..states import DensityMatrix
from .types import MeasureResult


logger = get_logger("coherelab.measures")

GAP_TOL = 1e-8
MAX_ITER = 2000
NEWTON_TOL = 1e-12
MIN_STEP = 1e-14


def _barrier_terms(t: np.ndarray, rho: np.ndarray) -> Tuple[float, np.ndarray]:
    """log det S and S^{-1} for S = diag(t) - rho; raises LinAlgError if S is not PD."""
    s = np.diag(t).astype(np.complex128) - rho
    chol = scipy.linalg.cho_factor(s, lower=True)
    logdet = 2.0 * float(np.log(np.diag(chol[0]).real).sum())
    s_inv = scipy.linalg.cho_solve(chol, np.eye(t.size, dtype=np.complex128))
    return logdet, s_inv


def _is_feasible(t: np.ndarray, rho: np.ndarray) -> bool:
    try:
        _barrier_terms(t, rho)
    except np.linalg.LinAlgError:
        return False
    return True


def robustness(
    rho: DensityMatrix,
    *,
    gap_tol: float = GAP_TOL,
    max_iter: int = MAX_ITER
) -> MeasureResult:
    """
    Robustness of coherence C_R(rho) by a log-barrier interior-point method.

    Parameters
    ----------
    rho : DensityMatrix
        State to evaluate.
    gap_tol : float, default=1e-8
        Stop once the duality-gap estimate d * mu drops below this.
    max_iter : int, default=2000
        Total Newton-step budget across all barrier stages.

    Returns
    -------
    MeasureResult
        C_R = tr delta - 1 with the dominating diagonal delta as witness.

    Raises
    ------
    NumericalFailure
        If the Newton budget is exhausted before the gap target is met.

    Notes
    -----
    The barrier parameter mu follows the decade schedule 1, 1e-1, ...;
    each stage minimizes sum(t) - mu log det(diag(t) - rho) starting from
    the previous center. The start t_j = rho_jj + lambda_max(rho - Delta(rho))
    + 0.1 is strictly feasible.
    """
    d = rho.dim
    mat = rho.matrix
    pops = rho.populations
    if rho.is_diagonal():
        return MeasureResult(
            0.0,
            {"kind": "diagonal_operator", "t": pops},
            {"iterations": 0, "mu": 0.0, "gap": 0.0, "kkt_residual": 0.0},
        )

    coherent_part = mat - np.diag(np.diag(mat))
    t = pops + eig_hermitian(coherent_part).eigenvalues[0] + 0.1

    mu, iterations = 1.0, 0
    s_inv = None
    while True:
        while True:
            logdet, s_inv = _barrier_terms(t, mat)
            f_val = t.sum() - mu * logdet
            grad = 1.0 - mu * np.diag(s_inv).real
            hess = mu * np.abs(s_inv) ** 2
            try:
                step = -scipy.linalg.solve(hess, grad, assume_a="pos")
            except (np.linalg.LinAlgError, ValueError):
                step = -np.linalg.lstsq(hess, grad, rcond=None)[0]
            decrement = -float(grad @ step)
            if decrement / 2 <= NEWTON_TOL:
                break

            size = 1.0
            while size >= MIN_STEP:
                cand = t + size * step
                if _is_feasible(cand, mat):
                    cand_logdet, _ = _barrier_terms(cand, mat)
                    if cand.sum() - mu * cand_logdet <= f_val - 0.25 * size * decrement:
                        break
                size *= 0.5
            iterations += 1
            if iterations > max_iter:
                raise NumericalFailure(
                    "Robustness barrier method did not converge",
                    {"iterations": iterations, "mu": mu, "decrement": decrement},
                )
            if size < MIN_STEP:
                # numerical floor of this barrier stage
                break
            t = cand

        if d * mu < gap_tol:
            break
        mu /= 10.0

    _, s_inv = _barrier_terms(t, mat)
    # dual certificate: Z = mu S^{-1} rescaled to unit diagonal is dual
    # feasible, so tr(rho Z) <= 1 + C_R <= sum(t)
    z = mu * s_inv
    scale = 1.0 / np.sqrt(np.diag(z).real)
    z = z * np.outer(scale, scale)
    dual_value = float(np.trace(mat @ z).real)
    kkt = float(t.sum() - dual_value)
    value = float(t.sum() - 1.0)
    logger.debug(f"robustness: {iterations} Newton steps, final mu {mu:.1e}")
    return MeasureResult(
        value=max(value, 0.0),
        witness={"kind": "diagonal_operator", "t": t},
        diagnostics={
            "iterations": iterations,
            "mu": mu,
            "gap": d * mu,
            "kkt_residual": kkt,
        },
    )


def c_guess(rho: DensityMatrix, **options) -> MeasureResult:
    """Guessing bias of the equidistributed phase settings, C_R(rho) / d."""
    res = robustness(rho, **options)
    return MeasureResult(res.value / rho.dim, res.witness, res.diagnostics)
