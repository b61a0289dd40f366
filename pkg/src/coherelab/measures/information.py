"""
Bounds on the information-theoretic coherence measure C_I: the largest
Shannon mutual information between a phase setting drawn from an ensemble
on the phase orbit of rho and the detector outcome.

Upper bound: the Holevo bound gives C_I <= S(Delta(rho)) - S(rho).
Lower bound: any concrete (ensemble, detector) pair.
"""
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple
import numpy.typing as npt
import numpy as np

from ..base import get_logger
from ..errors import InvalidInput
from ..interferometer import PhaseGrid
from ..numerics import eig_hermitian, psd_eigenvalues, psd_inv_sqrt, shannon_entropy, von_neumann_entropy
from ..states import DensityMatrix, PhaseVector, Povm, apply_phases
from .baselines import c_rel_ent
from .types import MeasureResult, sign_patterns


logger = get_logger("coherelab.measures")

WEIGHT_TOL = 1e-10
ORBIT_TOL = 1e-8
KERNEL_TOL = 1e-9
KERNEL_LABEL = "kernel"
FLIP_PARTITION_DIM = 8


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Weighted family of states {(w_i, rho_i)} with sum w_i = 1."""
    weights: Tuple[float, ...]
    states: Tuple[DensityMatrix, ...]

    def __post_init__(self) -> None:
        weights = tuple(float(w) for w in self.weights)
        states = tuple(self.states)
        if len(weights) == 0 or len(weights) != len(states):
            raise InvalidInput("Ensemble needs one weight per state")
        if min(weights) < 0 or abs(sum(weights) - 1.0) > WEIGHT_TOL:
            raise InvalidInput(f"Ensemble weights must be a probability vector, sum is {sum(weights)!r}")
        if len({s.dim for s in states}) != 1:
            raise InvalidInput("Ensemble states must share one dimension")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "states", states)

    @property
    def dim(self) -> int:
        return self.states[0].dim

    def __len__(self) -> int:
        return len(self.states)

    def average(self) -> np.ndarray:
        return np.sum([w * s.matrix for w, s in zip(self.weights, self.states)], axis=0)


def phase_ensemble(
    rho: DensityMatrix,
    grid: PhaseGrid,
    weights: Optional[Sequence[float]] = None
) -> Ensemble:
    """Ensemble {(w_i, rho(alpha_i))} over the points of a phase grid (uniform by default)."""
    if grid.dim != rho.dim:
        raise InvalidInput(f"Phase grid has dim {grid.dim}, state has dim {rho.dim}")
    if weights is None:
        weights = np.full(len(grid), 1.0 / len(grid))
    states = tuple(apply_phases(rho, alpha) for alpha in grid.phase_vectors())
    return Ensemble(tuple(weights), states)


def orbit_phases(rho: DensityMatrix, sigma: DensityMatrix, *, tol: float = ORBIT_TOL) -> Optional[PhaseVector]:
    """
    Phases alpha with sigma = U(alpha) rho U(alpha)^dagger, or None.

    The phases are propagated along the graph of significant off-diagonal
    entries of rho; each connected component starts at phase zero.
    """
    a, b = rho.matrix, sigma.matrix
    if a.shape != b.shape or np.abs(np.abs(a) - np.abs(b)).max() > tol:
        return None
    d = rho.dim
    alpha = np.zeros(d)
    seen = np.zeros(d, dtype=bool)
    for root in range(d):
        if seen[root]:
            continue
        seen[root] = True
        stack = [root]
        while stack:
            j = stack.pop()
            for k in np.flatnonzero(np.abs(a[j]) > tol):
                if seen[k]:
                    continue
                # sigma_jk = rho_jk exp(i(alpha_j - alpha_k))
                alpha[k] = alpha[j] - np.angle(b[j, k] / a[j, k])
                seen[k] = True
                stack.append(int(k))
    phases = PhaseVector(alpha)
    if np.abs(apply_phases(rho, phases).matrix - b).max() > tol:
        return None
    return phases


def holevo_chi(ensemble: Ensemble) -> float:
    """Holevo quantity S(sum w_i rho_i) - sum w_i S(rho_i), in bits."""
    mixed = von_neumann_entropy(ensemble.average())
    parts = sum(w * von_neumann_entropy(s.matrix) for w, s in zip(ensemble.weights, ensemble.states))
    return max(mixed - parts, 0.0)


def pretty_good_measurement(ensemble: Ensemble) -> Povm:
    """
    Square-root measurement M_i = avg^{-1/2} w_i rho_i avg^{-1/2}.

    When the average state is rank deficient an extra outcome "kernel"
    projects onto its kernel so that the effects sum to the identity.
    """
    avg = ensemble.average()
    inv_root = psd_inv_sqrt(avg, cutoff=KERNEL_TOL)
    labels, effects = [], []
    for i, (w, s) in enumerate(zip(ensemble.weights, ensemble.states)):
        labels.append(i)
        effects.append(inv_root @ (w * s.matrix) @ inv_root)
    system = psd_eigenvalues(avg)
    kernel_vecs = system.eigenvectors[:, system.eigenvalues <= KERNEL_TOL]
    if kernel_vecs.shape[1] > 0:
        labels.append(KERNEL_LABEL)
        effects.append(kernel_vecs @ kernel_vecs.conj().T)
    return Povm(tuple(labels), tuple(effects))


def joint_distribution(ensemble: Ensemble, povm: Povm) -> npt.NDArray[np.float64]:
    """p[i, w] = w_i tr rho_i M_w."""
    if povm.dim != ensemble.dim:
        raise InvalidInput(f"POVM has dim {povm.dim}, ensemble has dim {ensemble.dim}")
    states = np.stack([s.matrix for s in ensemble.states])
    probs = np.einsum("sij,wji->sw", states, povm.stacked()).real
    return np.clip(probs, 0.0, None) * np.asarray(ensemble.weights)[:, None]


def mutual_information(joint) -> float:
    """Shannon mutual information of a joint distribution table, in bits."""
    p = np.asarray(joint, dtype=np.float64)
    p = p / p.sum()
    value = shannon_entropy(p.sum(axis=1)) + shannon_entropy(p.sum(axis=0)) - shannon_entropy(p)
    return max(value, 0.0)


def c_I_upper(rho: DensityMatrix) -> float:
    """Holevo bound on C_I: the relative entropy of coherence."""
    return c_rel_ent(rho)


def c_I_lower(rho: DensityMatrix, ensemble: Ensemble, povm: Povm) -> float:
    """
    Mutual information between ensemble label and outcome.

    Raises
    ------
    InvalidInput
        If an ensemble member is not a phase-shifted copy of rho, or on
        dimension mismatch.
    """
    if ensemble.dim != rho.dim:
        raise InvalidInput(f"Ensemble has dim {ensemble.dim}, state has dim {rho.dim}")
    for i, state in enumerate(ensemble.states):
        if orbit_phases(rho, state) is None:
            raise InvalidInput(f"Ensemble member {i} is not on the phase orbit of the state")
    return mutual_information(joint_distribution(ensemble, povm))


def phase_flip_sets(d: int) -> List[Tuple[int, ...]]:
    """
    Path subsets S for the phase-flip ensembles {rho, Z_S rho Z_S}.

    The last path is never flipped, so each cut appears once. Every cut is
    listed up to `FLIP_PARTITION_DIM`, beyond it only the single-path cuts.
    """
    if d < 2:
        return []
    if d > FLIP_PARTITION_DIM:
        return [(j,) for j in range(d - 1)] + [tuple(range(d - 1))]
    flips = []
    for signs in sign_patterns(d):
        flipped = tuple(np.flatnonzero(signs != signs[-1]).tolist())
        if flipped:
            flips.append(flipped)
    return flips


def kernel_merged_eigenbasis(diff: np.ndarray) -> Povm:
    """
    Projective measurement in the eigenbasis of a Hermitian difference
    with its kernel merged into one outcome.

    Kernel outcomes have equal probability under both states, so merging
    them leaves the mutual information unchanged and removes the
    dependence on the basis chosen inside the kernel.
    """
    system = eig_hermitian(diff)
    live = np.abs(system.eigenvalues) > KERNEL_TOL
    vecs = system.eigenvectors
    labels: List[Any] = list(range(int(live.sum())))
    effects = [np.outer(v, v.conj()) for v in vecs[:, live].T]
    if not live.all():
        kernel = vecs[:, ~live]
        labels.append(KERNEL_LABEL)
        effects.append(kernel @ kernel.conj().T)
    return Povm(tuple(labels), tuple(effects))


def phase_flip_witness(rho: DensityMatrix, flipped: Sequence[int]) -> Tuple[Ensemble, Povm, PhaseGrid]:
    """Binary ensemble {(1/2, rho), (1/2, Z_S rho Z_S)} and the eigenbasis detector of its difference."""
    alpha = np.zeros(rho.dim)
    alpha[list(flipped)] = np.pi
    grid = PhaseGrid(np.vstack([np.zeros(rho.dim), alpha]))
    ensemble = phase_ensemble(rho, grid)
    diff = ensemble.states[0].matrix - ensemble.states[1].matrix
    return ensemble, kernel_merged_eigenbasis(diff), grid


def default_information_witness(rho: DensityMatrix) -> Tuple[Ensemble, Povm, Dict[str, Any]]:
    """
    Ensemble and detector used for the default C_I lower bound.

    Candidates are the binary phase-flip ensembles over `phase_flip_sets`,
    each measured in the eigenbasis of rho - Z_S rho Z_S, plus for d >= 3
    the d equidistributed guessing settings with the pretty-good
    measurement. The candidate with the largest mutual information wins,
    the first one on ties.
    """
    d = rho.dim
    candidates = []
    for flipped in phase_flip_sets(d):
        ensemble, povm, grid = phase_flip_witness(rho, flipped)
        info = {"ensemble": "binary", "detector": "eigenbasis", "flipped": list(flipped)}
        candidates.append((ensemble, povm, {**info, "phases": grid.points}))
    if d >= 3 or not candidates:
        grid = PhaseGrid.guessing(d)
        ensemble = phase_ensemble(rho, grid)
        info = {"ensemble": "guessing", "detector": "pretty_good", "phases": grid.points}
        candidates.append((ensemble, pretty_good_measurement(ensemble), info))

    best, best_value = candidates[0], -np.inf
    for ensemble, povm, info in candidates:
        value = mutual_information(joint_distribution(ensemble, povm))
        if value > best_value + 1e-15:
            best, best_value = (ensemble, povm, info), value
    ensemble, povm, info = best
    return ensemble, povm, {**info, "candidates": len(candidates)}


def c_I_lower_default(rho: DensityMatrix) -> MeasureResult:
    """`c_I_lower` evaluated on `default_information_witness`."""
    ensemble, povm, info = default_information_witness(rho)
    value = mutual_information(joint_distribution(ensemble, povm))
    return MeasureResult(
        value=value,
        witness={"kind": "ensemble", **info},
        diagnostics={"holevo": holevo_chi(ensemble), "outcomes": len(povm.outcomes)},
    )
