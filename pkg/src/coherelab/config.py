from dataclasses import dataclass, asdict
from typing import Any, Dict, Optional, Tuple
from dotenv import load_dotenv
import json
import os

from .errors import InvalidInput


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise InvalidInput(f"Environment variable {name}={raw!r} is not an integer")
    if value < 0:
        raise InvalidInput(f"Environment variable {name} must be non-negative")
    return value


@dataclass(frozen=True)
class LabConfig:
    """
    Runtime settings shared by every coherelab service.

    Attributes
    ----------
    threads : int
        Upper bound on worker threads (COHERELAB_THREADS).
    seed : int
        Default RNG seed for randomized searches (COHERELAB_SEED).
    progress : bool
        Whether long runs draw a progress bar.
    """
    threads: int = 1
    seed: int = 0
    progress: bool = False

    @classmethod
    def from_env(
        cls,
        *,
        dotenv_path: Optional[str] = None,
        progress: bool = False
    ) -> "LabConfig":
        """
        Build a config from the process environment.

        A `.env` file is loaded first (without overriding variables that
        are already set). COHERELAB_THREADS caps worker parallelism; 0 or
        unset means min(8, cpu count).
        """
        load_dotenv(dotenv_path=dotenv_path, override=False)
        default_threads = min(8, os.cpu_count() or 1)
        threads = _env_int("COHERELAB_THREADS", default_threads) or default_threads
        return cls(
            threads=threads,
            seed=_env_int("COHERELAB_SEED", 0),
            progress=progress,
        )


@dataclass(frozen=True)
class SuiteConfig:
    """
    Parameters of a monotonicity suite run.

    Attributes
    ----------
    dimensions : tuple of int
        Hilbert-space dimensions to test.
    trials : int
        Random (state, channel) pairs per dimension.
    seed : int
        Master seed; every trial seed is derived from it.
    measures : tuple of str
        Registry names of the measures under test.
    tolerance : float
        Allowed negative monotonicity slack.
    check_bounds : bool
        Also evaluate the inequality chains on every trial state.
    explore_io : bool
        Additionally run random incoherent (IO) channels, reported only.
    """
    dimensions: Tuple[int, ...] = (2, 3, 4)
    trials: int = 50
    seed: int = 0
    measures: Tuple[str, ...] = (
        "c_max", "c_guess", "c_nabla_2", "c_nabla_inf",
        "c_fisher_2", "c_fisher_inf", "c_chernoff_2", "c_chernoff_inf",
    )
    tolerance: float = 1e-6
    check_bounds: bool = True
    explore_io: bool = False
    max_kraus: int = 3

    required_keys = ("dimensions", "trials", "seed", "measures", "tolerance")

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise InvalidInput("trials must be at least 1")
        if not self.dimensions or min(self.dimensions) < 1:
            raise InvalidInput("dimensions must be positive integers")
        if self.tolerance < 0:
            raise InvalidInput("tolerance must be non-negative")
        if self.max_kraus < 1:
            raise InvalidInput("max_kraus must be at least 1")

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["dimensions"] = list(self.dimensions)
        data["measures"] = list(self.measures)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SuiteConfig":
        missing = [k for k in cls.required_keys if k not in data]
        if missing:
            raise InvalidInput(f"Suite config is missing keys: {', '.join(missing)}")
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise InvalidInput(f"Suite config has unknown keys: {', '.join(sorted(unknown))}")
        try:
            return cls(
                dimensions=tuple(int(d) for d in data["dimensions"]),
                trials=int(data["trials"]),
                seed=int(data["seed"]),
                measures=tuple(str(m) for m in data["measures"]),
                tolerance=float(data["tolerance"]),
                check_bounds=bool(data.get("check_bounds", True)),
                explore_io=bool(data.get("explore_io", False)),
                max_kraus=int(data.get("max_kraus", 3)),
            )
        except (TypeError, ValueError) as e:
            raise InvalidInput(f"Suite config has a malformed value: {e}")

    @classmethod
    def from_file(cls, path: str) -> "SuiteConfig":
        """
        Load a suite config from a JSON file.

        Raises
        ------
        InvalidInput
            If the file is missing, is not valid JSON, or lacks required
            keys.
        """
        if not os.path.exists(path):
            raise InvalidInput(f"Suite config file not found: {path}")
        with open(path, "r") as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise InvalidInput(f"Suite config is not valid JSON: {e}")
        if not isinstance(data, dict):
            raise InvalidInput("Suite config must be a JSON object")
        return cls.from_dict(data)
