"""
File codecs and tabular helpers: state and POVM JSON, pattern CSV and the
12-significant-digit number formatting shared by every output.
"""
from pathlib import Path
from typing import Any, Dict, List, Optional, Union
import json
import os

import pandas as pd
import numpy as np

from .errors import InvalidInput
from .interferometer import PatternGrid
from .states import DensityMatrix, Povm


FIXTURE_DIR = Path(__file__).parent / "fixtures"
SIG_DIGITS = 12

PathLike = Union[str, os.PathLike]


def round_sig(x: float) -> float:
    """Round to 12 significant digits."""
    return float(f"{x:.{SIG_DIGITS}g}")


def format_number(x: float) -> str:
    """12 significant digits, always with a '.' decimal point."""
    return f"{x:.{SIG_DIGITS}g}"


def to_jsonable(obj: Any) -> Any:
    """
    Convert results to plain JSON types.

    Floats are rounded to 12 significant digits, numpy arrays become
    nested lists, complex numbers become [re, im] pairs, frozensets become
    sorted lists.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(to_jsonable(v) for v in obj)
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [round_sig(obj.real), round_sig(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        if not np.isfinite(obj):
            return None
        return round_sig(float(obj))
    return obj


def dump_json(data: Any, path: Optional[PathLike] = None) -> str:
    """Serialize with `to_jsonable`, stable key order; write to `path` if given."""
    text = json.dumps(to_jsonable(data), indent=2, sort_keys=True)
    if path is not None:
        with open(path, "w") as f:
            f.write(text + "\n")
    return text


def _complex_entry(value: Any, location) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        re, im = float(value), 0.0
    elif isinstance(value, list) and len(value) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        re, im = float(value[0]), float(value[1])
    else:
        raise InvalidInput("Entry must be a number or a [re, im] pair", location)
    if not (np.isfinite(re) and np.isfinite(im)):
        raise InvalidInput("Entry is not finite", location)
    return complex(re, im)


def _parse_matrix(rows: Any, d: int, what: str) -> np.ndarray:
    if not isinstance(rows, list) or len(rows) != d:
        raise InvalidInput(f"{what} must have {d} rows")
    mat = np.empty((d, d), dtype=np.complex128)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != d:
            raise InvalidInput(f"{what} row {i} must have {d} entries", (i, 0))
        for j, value in enumerate(row):
            mat[i, j] = _complex_entry(value, (i, j))
    return mat


def state_to_dict(rho: DensityMatrix) -> Dict[str, Any]:
    """`{"dim": d, "matrix": [[[re, im], ...], ...]}` at full precision."""
    return {
        "dim": rho.dim,
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in rho.matrix],
    }


def state_from_dict(data: Any) -> DensityMatrix:
    """
    Parse and validate the state schema.

    Raises
    ------
    InvalidInput
        With the (row, column) of the first bad entry when the matrix is
        malformed, not Hermitian or not a density matrix.
    """
    if not isinstance(data, dict) or "dim" not in data or "matrix" not in data:
        raise InvalidInput('State must be an object with "dim" and "matrix"')
    d = data["dim"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise InvalidInput(f"State dim must be a positive integer, got {d!r}")
    return DensityMatrix(_parse_matrix(data["matrix"], d, "State matrix"))


def write_state(rho: DensityMatrix, path: PathLike) -> None:
    with open(path, "w") as f:
        json.dump(state_to_dict(rho), f, indent=2)
        f.write("\n")


def resolve_state_path(path: PathLike) -> Path:
    """`path` itself, or the bundled fixture of that file name."""
    candidate = Path(path)
    if candidate.exists():
        return candidate
    fixture = FIXTURE_DIR / candidate.name
    if fixture.exists():
        return fixture
    raise InvalidInput(f"State file not found: {path}")


def read_state(path: PathLike) -> DensityMatrix:
    """
    Load a state file, falling back to the bundled fixtures
    (`qubit_plus.json`, `qutrit_example.json`) by file name.
    """
    resolved = resolve_state_path(path)
    with open(resolved, "r") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise InvalidInput(f"State file is not valid JSON: {e}")
    return state_from_dict(data)


def povm_from_dict(data: Any, d: int) -> Povm:
    """`{"outcomes": [...], "elements": [matrix, ...]}`, matrices in the state format."""
    if not isinstance(data, dict) or "elements" not in data:
        raise InvalidInput('POVM must be an object with "elements"')
    elements = data["elements"]
    if not isinstance(elements, list) or not elements:
        raise InvalidInput("POVM elements must be a non-empty list")
    outcomes = data.get("outcomes", list(range(len(elements))))
    if not isinstance(outcomes, list):
        raise InvalidInput("POVM outcomes must be a list")
    mats = [_parse_matrix(m, d, f"POVM element {i}") for i, m in enumerate(elements)]
    return Povm(tuple(outcomes), tuple(mats))


def parse_povm_spec(spec: str, d: int) -> Povm:
    """
    Detector from a command-line spec.

    `fourier`, `computational`, `basis:<JSON list of row vectors>` or the
    path of a JSON POVM file.
    """
    if spec == "fourier":
        return Povm.fourier(d)
    if spec == "computational":
        return Povm.computational(d)
    if spec.startswith("basis:"):
        try:
            rows = json.loads(spec[len("basis:"):])
        except json.JSONDecodeError as e:
            raise InvalidInput(f"Basis spec is not valid JSON: {e}")
        vectors = _parse_matrix(rows, d, "Basis")
        gram = vectors.conj() @ vectors.T
        if np.abs(gram - np.eye(d)).max() > 1e-9:
            raise InvalidInput("Basis vectors must be orthonormal")
        return Povm.from_basis(vectors)
    if not os.path.exists(spec):
        raise InvalidInput(f"Unknown POVM spec or missing file: {spec}")
    with open(spec, "r") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise InvalidInput(f"POVM file is not valid JSON: {e}")
    return povm_from_dict(data, d)


def pattern_to_dataframe(pattern: PatternGrid) -> pd.DataFrame:
    """
    One row per grid point with columns alpha_1..alpha_d, one p_<label>
    column per outcome and the row sum.
    """
    d = pattern.grid.dim
    df = pd.DataFrame(pattern.grid.points, columns=[f"alpha_{j + 1}" for j in range(d)])
    labels: List[str] = [f"p_{label}" for label in pattern.outcomes]
    probs = pd.DataFrame(pattern.table, columns=labels)
    df = pd.concat([df, probs], axis=1)
    df["row_sum"] = pattern.table.sum(axis=1)
    return df.astype("float64")


def write_pattern_csv(pattern: PatternGrid, path: PathLike) -> pd.DataFrame:
    df = pattern_to_dataframe(pattern)
    df.to_csv(path, index=False, float_format=f"%.{SIG_DIGITS}g")
    return df
