"""
Interference patterns P(omega|alpha) and visibility functionals on them.

Patterns are sampled on a finite grid of phase settings. The last path
phase is gauge-fixed to zero, since the response depends only on phase
differences.
"""
from dataclasses import dataclass
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple, Union
from itertools import product
import numpy.typing as npt
import scipy.spatial.distance
import numpy as np

from .errors import InvalidInput
from .numerics import as_hermitian, eig_hermitian
from .states import (
    TWO_PI,
    DensityMatrix,
    DiagonalHamiltonian,
    PhaseVector,
    Povm,
    SioChannel,
    apply_phases,
    validate_permutation,
)


DEFAULT_POINTS = {1: 1, 2: 33, 3: 33, 4: 9}
FALLBACK_POINTS = 5
FD_STEP = 1e-5
ROW_TOL = 1e-9

Assignment = Union[Mapping[Hashable, int], Sequence[Iterable[Hashable]]]


@dataclass(frozen=True, eq=False)
class PhaseGrid:
    """Finite set of phase settings, one row per point."""
    points: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        pts = np.atleast_2d(np.asarray(self.points, dtype=np.float64))
        if pts.shape[0] == 0 or pts.shape[1] == 0 or not np.all(np.isfinite(pts)):
            raise InvalidInput("Phase grid must contain finite points")
        pts = np.mod(pts, TWO_PI)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def phase_vectors(self) -> List[PhaseVector]:
        return [PhaseVector(p) for p in self.points]

    def translated(self, offset) -> "PhaseGrid":
        return PhaseGrid(self.points + np.asarray(offset, dtype=np.float64))

    def permuted(self, perm) -> "PhaseGrid":
        """Relabel paths: new coordinate perm[j] carries old coordinate j."""
        perm_arr = validate_permutation(perm, self.dim)
        out = np.empty_like(self.points)
        out[:, perm_arr] = self.points
        return PhaseGrid(out)

    @classmethod
    def uniform(cls, d: int, n: Optional[int] = None) -> "PhaseGrid":
        """
        Cartesian grid of n points per free torus dimension, alpha_d = 0.

        Points are 2 pi k / n for k = 0..n-1, so averages over the grid
        reproduce the torus average of every phase difference.
        """
        if d < 1:
            raise InvalidInput("Dimension must be positive")
        if n is None:
            n = DEFAULT_POINTS.get(d, FALLBACK_POINTS)
        if n < 1:
            raise InvalidInput("Need at least one point per dimension")
        axis = TWO_PI * np.arange(n) / n
        free = np.array(list(product(axis, repeat=d - 1))).reshape(-1, d - 1)
        return cls(np.hstack([free, np.zeros((free.shape[0], 1))]))

    @classmethod
    def sweep(cls, d: int, values, axis: int = 0) -> "PhaseGrid":
        """One-parameter sweep of path `axis`, all other phases zero."""
        vals = np.asarray(values, dtype=np.float64).ravel()
        pts = np.zeros((vals.size, d))
        pts[:, axis] = vals
        return cls(pts)

    @classmethod
    def guessing(
        cls,
        d: int,
        *,
        alpha0: Optional[PhaseVector] = None,
        perm: Optional[Sequence[int]] = None
    ) -> "PhaseGrid":
        """The d equidistributed settings alpha0 + j h_pi, j = 1..d."""
        return cls(np.array([
            PhaseVector.equidistributed(d, j, alpha0=alpha0, perm=perm).alpha
            for j in range(1, d + 1)
        ]))


@dataclass(frozen=True, eq=False)
class PatternGrid:
    """Sampled conditional distribution: table[i, w] = P(outcomes[w] | grid point i)."""
    grid: PhaseGrid
    outcomes: Tuple[Hashable, ...]
    table: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        table = np.atleast_2d(np.asarray(self.table, dtype=np.float64))
        outcomes = tuple(self.outcomes)
        if table.shape != (len(self.grid), len(outcomes)):
            raise InvalidInput(
                f"Pattern table has shape {table.shape}, expected "
                f"({len(self.grid)}, {len(outcomes)})"
            )
        if len(set(outcomes)) != len(outcomes):
            raise InvalidInput("Pattern outcome labels must be unique")
        if table.min() < -1e-10 or np.abs(table.sum(axis=1) - 1.0).max() > ROW_TOL:
            raise InvalidInput("Every pattern row must be a probability vector")
        table.setflags(write=False)
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "table", table)

    def column(self, label: Hashable) -> npt.NDArray[np.float64]:
        return self.table[:, self.outcomes.index(label)]


def sample_pattern(rho: DensityMatrix, povm: Povm, grid: PhaseGrid) -> PatternGrid:
    """
    Born response of detector `povm` to `rho` at every grid point.

    All points are evaluated in one vectorized contraction; the result does
    not depend on evaluation order.
    """
    if not rho.dim == povm.dim == grid.dim:
        raise InvalidInput(
            f"Dimension mismatch: state {rho.dim}, POVM {povm.dim}, grid {grid.dim}"
        )
    phases = np.exp(1j * grid.points)
    shifted = rho.matrix[None, :, :] * phases[:, :, None] * phases.conj()[:, None, :]
    table = np.einsum("nij,wji->nw", shifted, povm.stacked()).real
    return PatternGrid(grid, povm.outcomes, np.clip(table, 0.0, None))


def v_max_on_grid(pattern: PatternGrid) -> float:
    """Largest total-variation distance between two rows of the pattern."""
    if len(pattern.grid) < 2:
        return 0.0
    return float(scipy.spatial.distance.pdist(pattern.table, "cityblock").max() / 2)


def _outcome_sets(
    pattern: PatternGrid,
    assignment: Assignment,
    d: int
) -> List[List[int]]:
    index = {label: i for i, label in enumerate(pattern.outcomes)}
    if isinstance(assignment, Mapping):
        groups: List[List[Hashable]] = [[] for _ in range(d)]
        for label, j in assignment.items():
            if not 1 <= int(j) <= d:
                raise InvalidInput(f"Outcome {label!r} assigned to {j}, expected 1..{d}")
            groups[int(j) - 1].append(label)
    else:
        groups = [list(g) for g in assignment]
        if len(groups) != d:
            raise InvalidInput(f"Need {d} outcome sets, got {len(groups)}")

    seen: Dict[Hashable, int] = {}
    sets = []
    for j, group in enumerate(groups, start=1):
        cols = []
        for label in group:
            if label not in index:
                raise InvalidInput(f"Unknown outcome label {label!r}")
            if label in seen:
                raise InvalidInput(
                    f"Outcome {label!r} appears in both Omega_{seen[label]} and Omega_{j}"
                )
            seen[label] = j
            cols.append(index[label])
        sets.append(cols)
    return sets


def v_guess_on_pattern(pattern: PatternGrid, assignment: Assignment) -> float:
    """
    Guessing bias -1/d + (1/d) sum_j P(Omega_j | point j).

    Row j - 1 of the pattern must hold setting j of the guessing problem,
    as produced by `PhaseGrid.guessing`.
    """
    d = len(pattern.grid)
    sets = _outcome_sets(pattern, assignment, d)
    hits = sum(pattern.table[j, cols].sum() for j, cols in enumerate(sets))
    return float(-1.0 / d + hits / d)


def best_assignment(pattern: PatternGrid) -> Dict[Hashable, int]:
    """Maximum-likelihood guess j for every outcome (ties go to the lowest j)."""
    best = np.argmax(pattern.table, axis=0)
    return {label: int(j) + 1 for label, j in zip(pattern.outcomes, best)}


def v_guess_on_settings(
    rho: DensityMatrix,
    povm: Povm,
    alpha0: PhaseVector,
    perm: Sequence[int],
    assignment: Assignment
) -> float:
    """
    Bias of guessing which of the d equidistributed settings alpha0 + j h_pi
    was applied, given the outcome sets Omega_j.

    Raises
    ------
    InvalidInput
        If the outcome sets overlap or reference unknown outcomes.
    """
    grid = PhaseGrid.guessing(rho.dim, alpha0=alpha0, perm=perm)
    return v_guess_on_pattern(sample_pattern(rho, povm, grid), assignment)


def _check_effect(effect) -> np.ndarray:
    m0 = as_hermitian(effect, tol=1e-10)
    values = eig_hermitian(m0).eigenvalues
    if values[-1] < -1e-10 or values[0] > 1 + 1e-10:
        raise InvalidInput("M0 must satisfy 0 <= M0 <= identity")
    return m0


def directional_derivative(
    rho: DensityMatrix,
    effect,
    alpha: PhaseVector,
    h: DiagonalHamiltonian
) -> float:
    """
    Analytic derivative of I(alpha + t h) = tr rho(alpha + t h) M0 at t = 0.

    Uses dI/dt = -i tr [rho, H] M0' with M0' = U(alpha)^dagger M0 U(alpha).
    """
    m0 = _check_effect(effect)
    if not rho.dim == alpha.dim == h.dim == m0.shape[0]:
        raise InvalidInput("Dimension mismatch between state, effect, phases and H")
    u = alpha.unitary()
    rotated = u.conj().T @ m0 @ u
    comm = rho.matrix @ h.matrix - h.matrix @ rho.matrix
    return float((-1j * np.trace(comm @ rotated)).real)


def finite_difference_derivative(
    rho: DensityMatrix,
    effect,
    alpha: PhaseVector,
    h: DiagonalHamiltonian,
    *,
    step: float = FD_STEP
) -> float:
    """Central finite-difference estimate of the same derivative."""
    m0 = _check_effect(effect)

    def response(t: float) -> float:
        shifted = apply_phases(rho, PhaseVector(alpha.alpha + t * h.h))
        return float(np.trace(shifted.matrix @ m0).real)

    return (response(step) - response(-step)) / (2 * step)


def optimal_effect(X) -> np.ndarray:
    """
    Projector onto the positive eigenspace of Hermitian X.

    It maximizes tr X M0 over effects 0 <= M0 <= 1 (Helstrom measurement).
    """
    system = eig_hermitian(X)
    vecs = system.eigenvectors[:, system.eigenvalues > 0]
    return vecs @ vecs.conj().T


def mix_patterns(patterns: Sequence[PatternGrid], weights) -> PatternGrid:
    """
    Disjoint-outcome mixture: outcomes are concatenated and block i of the
    new table is weights[i] * patterns[i].table.
    """
    if len(patterns) == 0:
        raise InvalidInput("Need at least one pattern to mix")
    q = np.asarray(weights, dtype=np.float64).ravel()
    if q.shape != (len(patterns),) or q.min() < 0 or abs(q.sum() - 1.0) > 1e-10:
        raise InvalidInput("Mixture weights must be a probability vector, one per pattern")
    grid = patterns[0].grid
    for p in patterns[1:]:
        if p.grid.points.shape != grid.points.shape or not np.array_equal(p.grid.points, grid.points):
            raise InvalidInput("Patterns must share the same phase grid")
    labels: List[Hashable] = []
    for p in patterns:
        labels.extend(p.outcomes)
    if len(set(labels)) != len(labels):
        raise InvalidInput("Outcome labels of mixed patterns must be disjoint")
    table = np.hstack([w * p.table for w, p in zip(q, patterns)])
    return PatternGrid(grid, tuple(labels), table)


def theorem_one_measurement(channel: SioChannel, povms: Sequence[Povm]) -> Povm:
    """
    Coarse-grained detector {K_l^dagger M^l_w K_l} with outcomes (l, w).

    Its response to rho is the disjoint-outcome mixture of the responses of
    M^l to the SIO branches rho_l, with path phases permuted by pi_l.
    """
    ops = channel.kraus_operators()
    if len(povms) != len(ops):
        raise InvalidInput("Need one POVM per Kraus operator")
    labels, elements = [], []
    for lam, (k, povm) in enumerate(zip(ops, povms)):
        for label, eff in zip(povm.outcomes, povm.elements):
            labels.append((lam, label))
            elements.append(k.conj().T @ eff @ k)
    return Povm(tuple(labels), tuple(elements))
