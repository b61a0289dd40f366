"""
Dense complex linear algebra used throughout coherelab.

Every function is pure: inputs are never modified and results are fresh
arrays, so the helpers can be called from several threads at once.
Entropies are measured in bits.
"""
from typing import NamedTuple, Tuple
import numpy.typing as npt
import scipy.stats
import numpy as np

from .errors import InvalidInput, NotPsd


ComplexMatrix = npt.NDArray[np.complex128]
HermitianMatrix = npt.NDArray[np.complex128]

HERMITIAN_TOL = 1e-12
PSD_CLAMP = 1e-10


class EigenSystem(NamedTuple):
    """Eigenvalues sorted descending and the matching eigenvector columns."""
    eigenvalues: npt.NDArray[np.float64]
    eigenvectors: ComplexMatrix

    def reconstruct(self) -> ComplexMatrix:
        vecs = self.eigenvectors
        return (vecs * self.eigenvalues) @ vecs.conj().T


def as_square(A) -> ComplexMatrix:
    """
    Coerce `A` to a finite square complex matrix.

    Raises
    ------
    InvalidInput
        If `A` is not two-dimensional, not square, or has non-finite
        entries.
    """
    arr = np.array(A, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise InvalidInput(f"Expected a non-empty square matrix, got shape {arr.shape}")
    bad = np.argwhere(~np.isfinite(arr))
    if bad.size:
        raise InvalidInput("Matrix has non-finite entries", tuple(int(i) for i in bad[0]))
    return arr


def as_hermitian(
    A,
    *,
    tol: float = HERMITIAN_TOL
) -> HermitianMatrix:
    """
    Validate that `A` is Hermitian and return its exact symmetrization.

    The tolerance is absolute for matrices of norm up to one and relative
    beyond that.
    """
    arr = as_square(A)
    defect = np.abs(arr - arr.conj().T)
    scale = max(1.0, float(np.linalg.norm(arr)))
    if defect.max() > tol * scale:
        j, k = np.unravel_index(int(np.argmax(defect)), defect.shape)
        raise InvalidInput(
            f"Matrix is not Hermitian (defect {defect.max():.3e})",
            (int(j), int(k))
        )
    return (arr + arr.conj().T) / 2


def eig_hermitian(A) -> EigenSystem:
    """
    Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    A : array_like
        Hermitian matrix.

    Returns
    -------
    EigenSystem
        Eigenvalues in descending order with orthonormal eigenvector
        columns.

    Raises
    ------
    InvalidInput
        If `A` is not square, not finite or not Hermitian.
    """
    herm = as_hermitian(A)
    values, vectors = np.linalg.eigh(herm)
    order = np.argsort(values)[::-1]
    return EigenSystem(values[order], vectors[:, order])


def _apply_function(
    system: EigenSystem,
    values: npt.NDArray[np.float64]
) -> HermitianMatrix:
    vecs = system.eigenvectors
    out = (vecs * values) @ vecs.conj().T
    return (out + out.conj().T) / 2


def psd_eigenvalues(A) -> EigenSystem:
    """
    Eigensystem of a PSD matrix with small negative drift clamped to zero.

    Raises
    ------
    NotPsd
        If an eigenvalue is below -1e-10.
    """
    system = eig_hermitian(A)
    lowest = float(system.eigenvalues[-1])
    if lowest < -PSD_CLAMP:
        raise NotPsd(f"Matrix has eigenvalue {lowest:.3e} < -{PSD_CLAMP:g}")
    return EigenSystem(np.clip(system.eigenvalues, 0.0, None), system.eigenvectors)


def psd_sqrt(A) -> HermitianMatrix:
    """Principal square root of a positive semidefinite matrix."""
    system = psd_eigenvalues(A)
    return _apply_function(system, np.sqrt(system.eigenvalues))


def psd_inv_sqrt(
    A,
    *,
    cutoff: float = 1e-12
) -> HermitianMatrix:
    """
    Moore-Penrose inverse square root of a PSD matrix.

    Eigenvalues at or below `cutoff` are treated as the kernel and map to
    zero.
    """
    system = psd_eigenvalues(A)
    vals = system.eigenvalues
    inv = np.zeros_like(vals)
    mask = vals > cutoff
    inv[mask] = 1.0 / np.sqrt(vals[mask])
    return _apply_function(system, inv)


def trace_norm(A) -> float:
    """Sum of singular values of a square matrix."""
    arr = as_square(A)
    return float(np.linalg.svd(arr, compute_uv=False).sum())


def hermitian_trace_norms(stack: npt.NDArray[np.complex128]) -> npt.NDArray[np.float64]:
    """Trace norms of a stack of Hermitian matrices, shape (..., d, d)."""
    return np.abs(np.linalg.eigvalsh(stack)).sum(axis=-1)


def shannon_entropy(p) -> float:
    """Shannon entropy in bits with the convention 0 log 0 = 0."""
    probs = np.clip(np.asarray(p, dtype=np.float64).ravel(), 0.0, None)
    if probs.sum() <= 0:
        return 0.0
    return float(scipy.stats.entropy(probs, base=2))


def von_neumann_entropy(rho) -> float:
    """
    von Neumann entropy S(rho) = -tr rho log2 rho.

    Parameters
    ----------
    rho : array_like or DensityMatrix
        A density matrix.

    Returns
    -------
    float
        Entropy in bits, between 0 and log2(d).
    """
    system = psd_eigenvalues(np.asarray(rho))
    return shannon_entropy(system.eigenvalues)


def top_eigenpair(Q) -> Tuple[float, npt.NDArray[np.float64]]:
    """Largest eigenvalue and a unit eigenvector of a real symmetric matrix."""
    sym = np.asarray(Q, dtype=np.float64)
    sym = (sym + sym.T) / 2
    values, vectors = np.linalg.eigh(sym)
    vec = vectors[:, -1]
    # deterministic sign: first significant component positive
    pivot = vec[np.argmax(np.abs(vec) > 1e-12)]
    if pivot < 0:
        vec = -vec
    return float(values[-1]), vec
