"""
Domain objects of the multi-path interferometer model.

A state of a particle travelling along d paths is a density matrix in the
path basis. Phase shifters act diagonally, detectors are POVMs, and the
free operations of the resource theory are the strictly incoherent
channels whose Kraus operators are a diagonal matrix followed by a
permutation.
"""
from dataclasses import dataclass
from typing import Hashable, List, Optional, Sequence, Tuple
import numpy.typing as npt
import numpy as np

from .errors import InvalidInput, NotPsd
from .numerics import PSD_CLAMP, as_hermitian, as_square, eig_hermitian


TRACE_TOL = 1e-10
POVM_TOL = 1e-9
KRAUS_TOL = 1e-10
BRANCH_CUTOFF = 1e-12
TWO_PI = 2 * np.pi


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    Hermitian, positive semidefinite, unit-trace operator on C^d.

    The wrapped matrix is a read-only copy of the input; the instance can
    be shared freely between threads.
    """
    matrix: npt.NDArray[np.complex128]

    def __post_init__(self) -> None:
        herm = as_hermitian(self.matrix)
        trace = np.trace(herm).real
        if abs(trace - 1.0) > TRACE_TOL:
            raise InvalidInput(f"Density matrix trace is {trace!r}, expected 1")
        lowest = float(np.linalg.eigvalsh(herm)[0])
        if lowest < -PSD_CLAMP:
            raise NotPsd(f"Density matrix has eigenvalue {lowest:.3e}")
        object.__setattr__(self, "matrix", _frozen(herm))

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return np.array(self.matrix, copy=True)
        return np.array(self.matrix, dtype=dtype, copy=True)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def populations(self) -> npt.NDArray[np.float64]:
        return np.diag(self.matrix).real.copy()

    def is_diagonal(self, tol: float = 1e-14) -> bool:
        off = self.matrix - np.diag(np.diag(self.matrix))
        return bool(np.abs(off).max() <= tol)

    @classmethod
    def from_vector(cls, psi) -> "DensityMatrix":
        """Pure state |psi><psi| of a (not necessarily normalized) vector."""
        vec = np.asarray(psi, dtype=np.complex128).ravel()
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise InvalidInput("State vector must be non-zero")
        vec = vec / norm
        return cls(np.outer(vec, vec.conj()))

    @classmethod
    def diagonal(cls, populations) -> "DensityMatrix":
        return cls(np.diag(np.asarray(populations, dtype=np.complex128)))

    @classmethod
    def maximally_coherent(cls, d: int) -> "DensityMatrix":
        """Uniform superposition over all d paths: every entry equals 1/d."""
        return cls(np.full((d, d), 1.0 / d, dtype=np.complex128))

    @classmethod
    def qubit_plus(cls) -> "DensityMatrix":
        return cls.from_vector([1, 1])

    @classmethod
    def qutrit_example(cls) -> "DensityMatrix":
        """1/3 (|1>+|2>)(<1|+<2|) + 1/3 |3><3|."""
        rho = np.zeros((3, 3), dtype=np.complex128)
        rho[:2, :2] = 1.0 / 3
        rho[2, 2] = 1.0 / 3
        return cls(rho)


@dataclass(frozen=True, eq=False)
class PhaseVector:
    """Phase settings alpha of the d paths, each reduced mod 2 pi."""
    alpha: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        arr = np.asarray(self.alpha, dtype=np.float64).ravel()
        if arr.size == 0 or not np.all(np.isfinite(arr)):
            raise InvalidInput("Phase vector must be non-empty and finite")
        object.__setattr__(self, "alpha", _frozen(np.mod(arr, TWO_PI)))

    @property
    def dim(self) -> int:
        return self.alpha.size

    def unitary(self) -> npt.NDArray[np.complex128]:
        return np.diag(np.exp(1j * self.alpha))

    def shifted(self, offset) -> "PhaseVector":
        return PhaseVector(self.alpha + np.asarray(offset, dtype=np.float64))

    @classmethod
    def zeros(cls, d: int) -> "PhaseVector":
        return cls(np.zeros(d))

    @classmethod
    def equidistributed(
        cls,
        d: int,
        j: int,
        *,
        alpha0: Optional["PhaseVector"] = None,
        perm: Optional[Sequence[int]] = None
    ) -> "PhaseVector":
        """
        Guessing setting alpha0 + j h_pi with h_pi = (2 pi / d)(pi(1), ..., pi(d)).

        `perm` is 0-based; the identity permutation is the default.
        """
        perm_arr = validate_permutation(perm if perm is not None else range(d), d)
        base = np.zeros(d) if alpha0 is None else alpha0.alpha
        h = TWO_PI / d * (perm_arr + 1)
        return cls(base + j * h)


@dataclass(frozen=True, eq=False)
class DiagonalHamiltonian:
    """Diagonal generator H = diag(h) of phase shifts."""
    h: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        arr = np.asarray(self.h, dtype=np.float64).ravel()
        if arr.size == 0 or not np.all(np.isfinite(arr)):
            raise InvalidInput("Hamiltonian diagonal must be non-empty and finite")
        object.__setattr__(self, "h", _frozen(arr))

    @property
    def dim(self) -> int:
        return self.h.size

    @property
    def matrix(self) -> npt.NDArray[np.complex128]:
        return np.diag(self.h.astype(np.complex128))

    def norm(self, p: float) -> float:
        return float(np.linalg.norm(self.h, ord=p))

    @classmethod
    def from_partition(cls, d: int, s_plus, s_minus) -> "DiagonalHamiltonian":
        h = np.zeros(d)
        h[list(s_plus)] = 1.0
        h[list(s_minus)] = -1.0
        return cls(h)


@dataclass(frozen=True, eq=False)
class Povm:
    """
    Finite detector: outcome labels and PSD effects summing to identity.
    """
    outcomes: Tuple[Hashable, ...]
    elements: Tuple[npt.NDArray[np.complex128], ...]

    def __post_init__(self) -> None:
        outcomes = tuple(self.outcomes)
        if len(outcomes) == 0 or len(outcomes) != len(self.elements):
            raise InvalidInput("POVM needs one element per outcome label")
        if len(set(outcomes)) != len(outcomes):
            raise InvalidInput("POVM outcome labels must be unique")
        effects = tuple(_frozen(as_hermitian(m, tol=1e-10)) for m in self.elements)
        d = effects[0].shape[0]
        for label, eff in zip(outcomes, effects):
            if eff.shape != (d, d):
                raise InvalidInput(f"POVM element {label!r} has shape {eff.shape}")
            lowest = float(np.linalg.eigvalsh(eff)[0])
            if lowest < -PSD_CLAMP:
                raise NotPsd(f"POVM element {label!r} has eigenvalue {lowest:.3e}")
        total = np.sum(effects, axis=0)
        defect = float(np.abs(total - np.eye(d)).max())
        if defect > POVM_TOL:
            raise InvalidInput(f"POVM elements do not sum to identity (defect {defect:.3e})")
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "elements", effects)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def stacked(self) -> npt.NDArray[np.complex128]:
        return np.stack(self.elements)

    def effect(self, label: Hashable) -> npt.NDArray[np.complex128]:
        return self.elements[self.outcomes.index(label)]

    @classmethod
    def from_basis(
        cls,
        vectors,
        labels: Optional[Sequence[Hashable]] = None
    ) -> "Povm":
        """Projective measurement onto the given orthonormal vectors (rows)."""
        vecs = np.atleast_2d(np.asarray(vectors, dtype=np.complex128))
        if labels is None:
            labels = list(range(vecs.shape[0]))
        return cls(tuple(labels), tuple(np.outer(v, v.conj()) for v in vecs))

    @classmethod
    def computational(cls, d: int) -> "Povm":
        return cls.from_basis(np.eye(d))

    @classmethod
    def fourier(cls, d: int) -> "Povm":
        """Measurement in the basis with components zeta^(-t k) / sqrt(d)."""
        k = np.arange(d)
        zeta = np.exp(2j * np.pi / d)
        vectors = np.array([zeta ** (-t * k) for t in range(d)]) / np.sqrt(d)
        return cls.from_basis(vectors)

    @classmethod
    def two_outcome(
        cls,
        effect,
        labels: Tuple[Hashable, Hashable] = (0, 1)
    ) -> "Povm":
        m0 = as_hermitian(effect)
        return cls(labels, (m0, np.eye(m0.shape[0]) - m0))


def validate_permutation(perm, d: int) -> npt.NDArray[np.int64]:
    arr = np.asarray(list(perm), dtype=np.int64)
    if arr.shape != (d,) or sorted(arr.tolist()) != list(range(d)):
        raise InvalidInput(f"{list(perm)} is not a permutation of 0..{d - 1}")
    return arr


def permutation_matrix(perm) -> npt.NDArray[np.complex128]:
    """Matrix P with P|j> = |perm[j]>."""
    arr = np.asarray(perm, dtype=np.int64)
    d = arr.size
    mat = np.zeros((d, d), dtype=np.complex128)
    mat[arr, np.arange(d)] = 1.0
    return mat


@dataclass(frozen=True, eq=False)
class SioChannel:
    """
    Strictly incoherent channel given by Kraus operators K = pi D.

    Each entry of `kraus` is a pair (perm, amplitudes) with a 0-based
    permutation and the diagonal of D. Completeness requires that every
    column j satisfies sum over Kraus operators of |c_j|^2 = 1.
    """
    kraus: Tuple[Tuple[Tuple[int, ...], npt.NDArray[np.complex128]], ...]

    def __post_init__(self) -> None:
        if len(self.kraus) == 0:
            raise InvalidInput("SIO channel needs at least one Kraus operator")
        d = len(self.kraus[0][0])
        cleaned = []
        for perm, amps in self.kraus:
            perm_arr = validate_permutation(perm, d)
            amp_arr = np.asarray(amps, dtype=np.complex128).ravel()
            if amp_arr.shape != (d,) or not np.all(np.isfinite(amp_arr)):
                raise InvalidInput("Kraus amplitudes must be a finite vector of length d")
            cleaned.append((tuple(int(p) for p in perm_arr), _frozen(amp_arr)))
        weights = np.sum([np.abs(a) ** 2 for _, a in cleaned], axis=0)
        defect = float(np.abs(weights - 1.0).max())
        if defect > KRAUS_TOL:
            raise InvalidInput(f"Kraus set is incomplete (defect {defect:.3e})")
        object.__setattr__(self, "kraus", tuple(cleaned))

    @property
    def dim(self) -> int:
        return len(self.kraus[0][0])

    def kraus_operators(self) -> List[npt.NDArray[np.complex128]]:
        return [permutation_matrix(perm) @ np.diag(amps) for perm, amps in self.kraus]

    @classmethod
    def identity(cls, d: int) -> "SioChannel":
        return cls(((tuple(range(d)), np.ones(d)),))

    @classmethod
    def dephasing(cls, d: int) -> "SioChannel":
        return cls(tuple((tuple(range(d)), row) for row in np.eye(d)))

    @classmethod
    def incoherent_unitary(cls, perm, phases) -> "SioChannel":
        phases = np.asarray(phases, dtype=np.float64)
        return cls(((tuple(perm), np.exp(1j * phases)),))


def dephase(rho: DensityMatrix) -> DensityMatrix:
    """Diagonal part of rho in the path basis."""
    return DensityMatrix(np.diag(np.diag(rho.matrix)))


def phase_unitary(alpha: PhaseVector) -> npt.NDArray[np.complex128]:
    return alpha.unitary()


def _check_dims(expected: int, *objects) -> None:
    for obj in objects:
        if obj.dim != expected:
            raise InvalidInput(
                f"Dimension mismatch: {type(obj).__name__} has dim {obj.dim}, "
                f"expected {expected}"
            )


def apply_phases(rho: DensityMatrix, alpha: PhaseVector) -> DensityMatrix:
    """rho(alpha) = U(alpha) rho U(alpha)^dagger."""
    _check_dims(rho.dim, alpha)
    phase = np.exp(1j * alpha.alpha)
    return DensityMatrix(rho.matrix * np.outer(phase, phase.conj()))


def born_distribution(
    rho: DensityMatrix,
    alpha: PhaseVector,
    povm: Povm
) -> npt.NDArray[np.float64]:
    """
    Outcome probabilities tr[rho(alpha) M_omega], ordered like povm.outcomes.

    Raises
    ------
    InvalidInput
        On dimension mismatch.
    """
    _check_dims(rho.dim, alpha, povm)
    shifted = apply_phases(rho, alpha).matrix
    probs = np.einsum("ij,wji->w", shifted, povm.stacked()).real
    return np.clip(probs, 0.0, None)


def apply_kraus(
    rho: DensityMatrix,
    kraus_ops: Sequence[np.ndarray],
    *,
    cutoff: float = BRANCH_CUTOFF
) -> List[Tuple[float, DensityMatrix]]:
    """
    Selective application of a Kraus family.

    Returns the pairs (q, rho_out) with q = tr K rho K^dagger and the
    normalized output; branches with q <= cutoff are dropped.
    """
    ops = [as_square(k) for k in kraus_ops]
    for k in ops:
        if k.shape != (rho.dim, rho.dim):
            raise InvalidInput(f"Kraus operator has shape {k.shape}, expected dim {rho.dim}")
    completeness = np.sum([k.conj().T @ k for k in ops], axis=0)
    defect = float(np.abs(completeness - np.eye(rho.dim)).max())
    if defect > POVM_TOL:
        raise InvalidInput(f"Kraus operators are incomplete (defect {defect:.3e})")

    branches = []
    for k in ops:
        out = k @ rho.matrix @ k.conj().T
        out = (out + out.conj().T) / 2
        q = float(np.trace(out).real)
        if q > cutoff:
            branches.append((q, _normalized_branch(out / q)))
    return branches


def _normalized_branch(mat: np.ndarray) -> DensityMatrix:
    # rounding on nearly orthogonal branches can leave tiny negative
    # eigenvalues after division by a small q
    values, vectors = np.linalg.eigh(mat)
    if values[0] < 0:
        values = np.clip(values, 0.0, None)
        mat = (vectors * values) @ vectors.conj().T
        mat = mat / np.trace(mat).real
    return DensityMatrix(mat)


def apply_sio(rho: DensityMatrix, channel: SioChannel) -> List[Tuple[float, DensityMatrix]]:
    """Selective SIO branches K rho K^dagger =: q rho_lambda."""
    _check_dims(rho.dim, channel)
    return apply_kraus(rho, channel.kraus_operators())


def random_density(d: int, rank: int, seed: int) -> DensityMatrix:
    """
    Random state rho = G G^dagger / tr G G^dagger from a complex Gaussian
    d x rank matrix G, deterministic per seed.
    """
    if d < 1 or not 1 <= rank <= d:
        raise InvalidInput(f"rank must lie in [1, {d}], got {rank}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real)


def random_sio(d: int, n_kraus: int, seed: int) -> SioChannel:
    """
    Random SIO with uniformly random permutations and complex Gaussian
    amplitudes normalized column by column.
    """
    if d < 1 or n_kraus < 1:
        raise InvalidInput("Need d >= 1 and n_kraus >= 1")
    rng = np.random.default_rng(seed)
    perms = [rng.permutation(d) for _ in range(n_kraus)]
    amps = rng.standard_normal((n_kraus, d)) + 1j * rng.standard_normal((n_kraus, d))
    amps /= np.sqrt((np.abs(amps) ** 2).sum(axis=0, keepdims=True))
    return SioChannel(tuple((tuple(p), a) for p, a in zip(perms, amps)))


def lowest_eigenvalue(rho: DensityMatrix) -> float:
    return float(eig_hermitian(rho.matrix).eigenvalues[-1])
