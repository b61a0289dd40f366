from typing import Dict, Optional, Sequence

from .base import BaseRunner
from .config import LabConfig
from .harness import MonotonicityHarness
from .interferometer import PatternGrid, PhaseGrid, sample_pattern
from .measures import MEASURES, MeasureResult, evaluate
from .measures.registry import validate_names
from .states import DensityMatrix, Povm


class CoherenceLab(BaseRunner):
    """
    Central entry point: evaluates measures, samples interference
    patterns and owns the monotonicity harness.

    Every service shares the same `LabConfig`.
    """

    logger_name = "coherelab"

    def __init__(
        self,
        *,
        config: Optional[LabConfig] = None
    ):
        super().__init__(config=config or LabConfig())
        self.harness = MonotonicityHarness(config=self.config)

    def measure(
        self,
        rho: DensityMatrix,
        names: Optional[Sequence[str]] = None
    ) -> Dict[str, MeasureResult]:
        """
        Evaluate several measures on one state, one measure per thread.

        Parameters
        ----------
        rho : DensityMatrix
            State to evaluate.
        names : sequence of str, optional
            Registry names; all measures when omitted.

        Returns
        -------
        dict
            Name -> MeasureResult, in the order of `names`.
        """
        names = validate_names(names) if names is not None else list(MEASURES)
        results = self.map_parallel(
            lambda name: evaluate(name, rho),
            names,
            description="Measures",
        )
        self.logger.debug(f"evaluated {len(names)} measures at d={rho.dim}")
        return dict(zip(names, results))

    def pattern(
        self,
        rho: DensityMatrix,
        povm: Povm,
        grid: Optional[PhaseGrid] = None
    ) -> PatternGrid:
        """Born response on `grid` (default: the uniform grid for rho's dimension)."""
        return sample_pattern(rho, povm, grid or PhaseGrid.uniform(rho.dim))
