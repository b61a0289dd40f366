from .lab import CoherenceLab
from .config import LabConfig, SuiteConfig
from .errors import CoherelabError, InvalidInput, NotPsd, NumericalFailure, Unsupported
from .states import DensityMatrix, PhaseVector, DiagonalHamiltonian, Povm, SioChannel
from .harness import MonotonicityHarness

__version__ = "0.1.0"
