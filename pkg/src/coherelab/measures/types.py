from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Tuple
import numpy.typing as npt
import numpy as np

from ..errors import InvalidInput, Unsupported
from ..states import DensityMatrix, DiagonalHamiltonian


MAX_PARTITION_DIM = 20
BATCH = 4096


@dataclass(frozen=True)
class Partition:
    """Disjoint path subsets S+ and S- (0-based) defining H = Pi+ - Pi-."""
    s_plus: FrozenSet[int]
    s_minus: FrozenSet[int]

    def __post_init__(self) -> None:
        plus, minus = frozenset(self.s_plus), frozenset(self.s_minus)
        if plus & minus:
            raise InvalidInput(f"Partition sets overlap on {sorted(plus & minus)}")
        object.__setattr__(self, "s_plus", plus)
        object.__setattr__(self, "s_minus", minus)

    def is_full(self, d: int) -> bool:
        return self.s_plus | self.s_minus == frozenset(range(d))

    def projector(self, d: int, sign: int) -> npt.NDArray[np.complex128]:
        members = self.s_plus if sign > 0 else self.s_minus
        diag = np.zeros(d, dtype=np.complex128)
        diag[sorted(members)] = 1.0
        return np.diag(diag)

    def hamiltonian(self, d: int) -> DiagonalHamiltonian:
        return DiagonalHamiltonian.from_partition(d, sorted(self.s_plus), sorted(self.s_minus))

    def to_dict(self) -> Dict[str, Any]:
        return {"s_plus": sorted(self.s_plus), "s_minus": sorted(self.s_minus)}

    @classmethod
    def from_signs(cls, signs) -> "Partition":
        signs = np.asarray(signs)
        return cls(
            frozenset(np.flatnonzero(signs > 0).tolist()),
            frozenset(np.flatnonzero(signs < 0).tolist()),
        )


@dataclass
class MeasureResult:
    """
    Value of a coherence measure with the witness that attains it.

    `witness` describes the optimizer's argmax (phases, partition,
    Hamiltonian diagonal or diagonal state); `diagnostics` records
    iterations, restarts and residuals.
    """
    value: float
    witness: Dict[str, Any] = field(default_factory=dict)
    diagnostics: Dict[str, Any] = field(default_factory=dict)


def sign_patterns(d: int) -> npt.NDArray[np.float64]:
    """
    All vectors in {+1, -1}^d with first entry +1, in binary order.

    Fixing the first sign removes the global sign symmetry H -> -H.
    """
    if d > MAX_PARTITION_DIM:
        raise Unsupported(
            f"Partition enumeration is limited to d <= {MAX_PARTITION_DIM}, got {d}"
        )
    if d == 1:
        return np.ones((1, 1))
    idx = np.arange(2 ** (d - 1))[:, None]
    bits = (idx >> np.arange(d - 2, -1, -1)) & 1
    return np.hstack([np.ones((idx.size, 1)), 1.0 - 2.0 * bits])


def quadratic_form_max_on_signs(Q: np.ndarray, d: int) -> Tuple[float, np.ndarray]:
    """Maximum of s.Q.s over full sign patterns, first maximizer on ties."""
    best_value, best_signs = -np.inf, None
    patterns = sign_patterns(d)
    for start in range(0, patterns.shape[0], BATCH):
        chunk = patterns[start:start + BATCH]
        values = np.einsum("nm,mk,nk->n", chunk, Q, chunk)
        i = int(np.argmax(values))
        if values[i] > best_value + 1e-15:
            best_value, best_signs = float(values[i]), chunk[i]
    return best_value, best_signs


def check_dim(rho: DensityMatrix, limit: int = MAX_PARTITION_DIM) -> None:
    if rho.dim > limit:
        raise Unsupported(f"Exhaustive search is limited to d <= {limit}, got {rho.dim}")
