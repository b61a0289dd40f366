"""
Measurement-optimized Fisher information for phase shifts generated by a
diagonal Hamiltonian, and the coherence measures built on it.

With rho = sum_j lambda_j |e_j><e_j|,

    F(rho, H) = sum_{j,k} (lambda_j - lambda_k)^2 / (lambda_j + lambda_k) |<e_j|H|e_k>|^2

which is quadratic in the diagonal h of H: F = h . Q_F . h.
"""
import numpy.typing as npt
import numpy as np

from ..base import get_logger
from ..errors import InvalidInput
from ..numerics import psd_eigenvalues, top_eigenpair
from ..states import DensityMatrix, DiagonalHamiltonian
from .types import MeasureResult, Partition, check_dim, quadratic_form_max_on_signs


logger = get_logger("coherelab.measures")

KERNEL_CUTOFF = 1e-12


def fisher_coefficients(eigenvalues: np.ndarray) -> npt.NDArray[np.float64]:
    """
    c_jk = (lambda_j - lambda_k)^2 / (lambda_j + lambda_k); pairs with
    lambda_j + lambda_k <= 1e-12 contribute 0.
    """
    lam = np.asarray(eigenvalues, dtype=np.float64)
    total = lam[:, None] + lam[None, :]
    diff = (lam[:, None] - lam[None, :]) ** 2
    coeffs = np.zeros_like(total)
    mask = total > KERNEL_CUTOFF
    coeffs[mask] = diff[mask] / total[mask]
    return coeffs


def fisher_info(rho: DensityMatrix, hamiltonian: DiagonalHamiltonian) -> float:
    """
    Fisher information of the phase family exp(-itH) rho exp(itH),
    optimized over measurements.

    Parameters
    ----------
    rho : DensityMatrix
        Probe state.
    hamiltonian : DiagonalHamiltonian
        Generator of the phase shift.

    Returns
    -------
    float
        Non-negative Fisher information; 0 whenever [rho, H] = 0.
    """
    if hamiltonian.dim != rho.dim:
        raise InvalidInput(f"Hamiltonian has dim {hamiltonian.dim}, state has dim {rho.dim}")
    system = psd_eigenvalues(rho.matrix)
    vecs = system.eigenvectors
    h_eig = vecs.conj().T @ (hamiltonian.h[:, None] * vecs)
    coeffs = fisher_coefficients(system.eigenvalues)
    return max(float((coeffs * np.abs(h_eig) ** 2).sum()), 0.0)


def fisher_quadratic_form(rho: DensityMatrix) -> npt.NDArray[np.float64]:
    """
    Real symmetric Q_F with F(rho, diag(h)) = h . Q_F . h.

    Q_F[m, n] = sum_jk c_jk Re(<e_j|m><m|e_k><e_k|n><n|e_j>).
    """
    system = psd_eigenvalues(rho.matrix)
    vecs = system.eigenvectors
    coeffs = fisher_coefficients(system.eigenvalues)
    # amp[m, j, k] = <e_j|m><m|e_k>
    amp = vecs.conj()[:, :, None] * vecs[:, None, :]
    q = np.einsum("jk,mjk,njk->mn", coeffs, amp, amp.conj()).real
    return (q + q.T) / 2


def c_fisher_2(rho: DensityMatrix) -> MeasureResult:
    """Top eigenvalue of Q_F: the maximum of F over ||h||_2 = 1."""
    if rho.is_diagonal():
        h = np.zeros(rho.dim)
        h[0] = 1.0
        return MeasureResult(0.0, {"kind": "hamiltonian", "h": h}, {"method": "eigh"})
    value, vec = top_eigenpair(fisher_quadratic_form(rho))
    return MeasureResult(
        value=max(value, 0.0),
        witness={"kind": "hamiltonian", "h": vec},
        diagnostics={"method": "eigh"},
    )


def c_fisher_inf(rho: DensityMatrix) -> MeasureResult:
    """
    Maximum of F over H = Pi+ - Pi-.

    Only full partitions are enumerated: F is convex in h, so a maximum
    over the cube [-1, 1]^d sits at a vertex and the partial partitions
    (zeros in h) never win.

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
    value, signs = quadratic_form_max_on_signs(fisher_quadratic_form(rho), d)
    partition = Partition.from_signs(signs)
    return MeasureResult(
        value=max(value, 0.0),
        witness={"kind": "partition", **partition.to_dict()},
        diagnostics={"partitions": 2 ** (d - 1)},
    )
