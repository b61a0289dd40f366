"""
Sensitivity of the interference pattern to a small phase shift.

C_nabla^(p)(rho) = max 1/2 ||[rho, H]||_1 over diagonal H with ||H||_p <= 1.
For p = inf the extremal H are full partitions Pi+ - Pi-; for p = 2 the
maximum is taken over the unit sphere of the sum-zero subspace, since a
multiple of the identity leaves the commutator unchanged.
"""
from dataclasses import dataclass, asdict
from typing import Any, Dict, Optional
import scipy.optimize
import numpy as np

from ..base import get_logger
from ..errors import InvalidInput
from ..numerics import as_hermitian, hermitian_trace_norms
from ..states import DensityMatrix, DiagonalHamiltonian
from .types import (
    BATCH,
    MAX_PARTITION_DIM,
    MeasureResult,
    Partition,
    check_dim,
    sign_patterns,
)


logger = get_logger("coherelab.measures")

NABLA_RESTARTS = 20
MEMBERSHIP_TOL = 1e-10


def commutator(rho: DensityMatrix, h) -> np.ndarray:
    """[rho, diag(h)], entries rho_jk (h_k - h_j)."""
    h = np.asarray(h, dtype=np.float64)
    return rho.matrix * (h[None, :] - h[:, None])


def _nabla_batch(mat: np.ndarray, hs: np.ndarray) -> np.ndarray:
    out = np.empty(hs.shape[0])
    for start in range(0, hs.shape[0], BATCH):
        chunk = hs[start:start + BATCH]
        diffs = chunk[:, None, :] - chunk[:, :, None]
        # i [rho, H] is Hermitian with the same trace norm
        out[start:start + BATCH] = 0.5 * hermitian_trace_norms(1j * mat[None] * diffs)
    return out


def nabla_value(rho: DensityMatrix, hamiltonian: DiagonalHamiltonian) -> float:
    """1/2 ||[rho, H]||_1 for a single diagonal Hamiltonian."""
    if hamiltonian.dim != rho.dim:
        raise InvalidInput(f"Hamiltonian has dim {hamiltonian.dim}, state has dim {rho.dim}")
    return float(_nabla_batch(rho.matrix, hamiltonian.h[None, :])[0])


def c_nabla_inf(rho: DensityMatrix) -> MeasureResult:
    """
    Exhaustive search over full partitions S+ | S- of the paths.

    Raises
    ------
    Unsupported
        If d exceeds the enumeration limit.
    """
    check_dim(rho)
    d = rho.dim
    if d == 1 or rho.is_diagonal():
        partition = Partition(frozenset(range(d)), frozenset())
        return MeasureResult(0.0, {"kind": "partition", **partition.to_dict()}, {"partitions": 0})

    patterns = sign_patterns(d)
    values = _nabla_batch(rho.matrix, patterns)
    best = int(np.argmax(values))
    partition = Partition.from_signs(patterns[best])
    return MeasureResult(
        value=float(values[best]),
        witness={"kind": "partition", **partition.to_dict()},
        diagnostics={"partitions": int(patterns.shape[0])},
    )


def _sum_zero_basis(d: int) -> np.ndarray:
    """Orthonormal d x (d-1) basis of the vectors with zero sum."""
    ones = np.ones((d, 1)) / np.sqrt(d)
    q, _ = np.linalg.qr(np.hstack([ones, np.eye(d)[:, : d - 1]]))
    return q[:, 1:]


def c_nabla_2(
    rho: DensityMatrix,
    *,
    restarts: int = NABLA_RESTARTS,
    seed: Optional[int] = 0
) -> MeasureResult:
    """
    Maximize 1/2 ||[rho, diag(h)]||_1 over the unit sphere ||h||_2 = 1.

    Parameters
    ----------
    rho : DensityMatrix
        State to evaluate.
    restarts : int, default=20
        Nelder-Mead starts. The first start is the normalized best
        partition of `c_nabla_inf` (when d allows the enumeration), the
        others are random directions.
    seed : int, optional
        Seed for the random starts.

    Returns
    -------
    MeasureResult
        Value and the maximizing unit vector h (sum zero).
    """
    d = rho.dim
    if d == 1 or rho.is_diagonal():
        h = np.zeros(d)
        if d > 1:
            h[0], h[1] = 1 / np.sqrt(2), -1 / np.sqrt(2)
        return MeasureResult(0.0, {"kind": "hamiltonian", "h": h}, {"restarts": 0})

    mat = rho.matrix
    basis = _sum_zero_basis(d)

    def to_h(y: np.ndarray) -> np.ndarray:
        h = basis @ y
        norm = np.linalg.norm(h)
        return h / norm if norm > 0 else basis[:, 0]

    def objective(y: np.ndarray) -> float:
        return -float(_nabla_batch(mat, to_h(y)[None, :])[0])

    starts = []
    if d <= MAX_PARTITION_DIM:
        signs = sign_patterns(d)
        start_values = _nabla_batch(mat, signs / np.sqrt(d))
        starts.append(basis.T @ signs[int(np.argmax(start_values))])
    rng = np.random.default_rng(seed)
    while len(starts) < max(restarts, 1):
        starts.append(rng.standard_normal(d - 1))

    best_value, best_h, nfev = -np.inf, None, 0
    for y0 in starts:
        res = scipy.optimize.minimize(
            objective,
            y0,
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 2000 * d},
        )
        nfev += res.nfev
        if -res.fun > best_value + 1e-15:
            best_value, best_h = float(-res.fun), to_h(res.x)

    logger.debug(f"c_nabla_2: {len(starts)} starts, {nfev} evaluations")
    return MeasureResult(
        value=best_value,
        witness={"kind": "hamiltonian", "h": best_h},
        diagnostics={"restarts": len(starts), "evaluations": int(nfev)},
    )


@dataclass
class MembershipReport:
    """
    Necessary conditions for X to lie in the set of attainable
    derivatives (1/2i)[H, B] with ||H||_p <= 1 and 0 <= B <= 1.

    `decided` is always False: passing both checks does not prove
    membership.
    """
    zero_diagonal: bool
    max_diagonal: float
    norm_bound: bool
    schatten_norm: float
    p: float
    decided: bool = False

    @property
    def passed(self) -> bool:
        return self.zero_diagonal and self.norm_bound

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["p"] = "inf" if np.isinf(self.p) else self.p
        data["passed"] = self.passed
        return data


def commutator_set_membership_check(
    X,
    p: float = np.inf,
    *,
    tol: float = MEMBERSHIP_TOL
) -> MembershipReport:
    """
    Check zero diagonal and Schatten norm ||X||_p <= 1 for a Hermitian X.

    Raises
    ------
    InvalidInput
        If X is not Hermitian or p < 1.
    """
    arr = as_hermitian(X)
    p = float(p)
    if p < 1:
        raise InvalidInput(f"Schatten index must be >= 1, got {p}")
    max_diag = float(np.abs(np.diag(arr)).max())
    singular = np.abs(np.linalg.eigvalsh(arr))
    norm = float(singular.max() if np.isinf(p) else np.linalg.norm(singular, ord=p))
    return MembershipReport(
        zero_diagonal=max_diag <= tol,
        max_diagonal=max_diag,
        norm_bound=norm <= 1.0 + tol,
        schatten_norm=norm,
        p=p,
    )
