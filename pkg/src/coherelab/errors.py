from typing import Any, Dict, Optional, Tuple


class CoherelabError(Exception):
    """Base class for every error raised by coherelab."""


class InvalidInput(CoherelabError, ValueError):
    """
    Raised when an input violates a documented precondition.

    Parameters
    ----------
    message : str
        Human readable description.
    location : tuple of int, optional
        (row, column) of the offending matrix entry, when known. Used by
        the CLI to point at the broken cell of a state file.
    """

    def __init__(
        self,
        message: str,
        location: Optional[Tuple[int, int]] = None
    ) -> None:
        if location is not None:
            message = f"{message} (at row {location[0]}, column {location[1]})"
        super().__init__(message)
        self.location = location


class NotPsd(InvalidInput):
    """An operator that must be positive semidefinite is not."""


class NumericalFailure(CoherelabError, RuntimeError):
    """
    An iterative solver did not converge.

    The `diagnostics` mapping carries iteration counts, the last barrier
    parameter and residuals so that the failure can be reproduced.
    """

    def __init__(
        self,
        message: str,
        diagnostics: Optional[Dict[str, Any]] = None
    ) -> None:
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class Unsupported(CoherelabError, NotImplementedError):
    """The request exceeds an enumeration or dimension limit."""
