"""JSON state files: {"d_a": int, "d_b": int, "matrix": [[[re,im],...],...]} row-major."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .bipartite import DensityOperator, HermitianOperator


class StateFormatError(ValueError):
    """Raised when a state file violates the schema or an operator invariant."""


def matrix_to_json(mat: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(mat, dtype=complex)]


def matrix_from_json(rows: list) -> np.ndarray:
    try:
        arr = np.asarray(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise StateFormatError(f"matrix entries malformed: {exc}") from None
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise StateFormatError(f"matrix must be square with [re,im] entries, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def save_state(path: str | Path, rho: HermitianOperator) -> None:
    doc = {"d_a": rho.d_a, "d_b": rho.d_b, "matrix": matrix_to_json(rho.mat)}
    Path(path).write_text(json.dumps(doc))


def load_state(path: str | Path, *, density: bool = True) -> DensityOperator | HermitianOperator:
    """Load a state file; validates Hermiticity always, trace/PSD when density=True."""
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise StateFormatError(f"state file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise StateFormatError(f"invalid JSON in {path}: {exc}") from None
    for key in ("d_a", "d_b", "matrix"):
        if key not in doc:
            raise StateFormatError(f"missing field {key!r}")
    d_a, d_b = doc["d_a"], doc["d_b"]
    if not (isinstance(d_a, int) and isinstance(d_b, int) and d_a >= 1 and d_b >= 1):
        raise StateFormatError("d_a and d_b must be positive integers")
    mat = matrix_from_json(doc["matrix"])
    if mat.shape[0] != d_a * d_b:
        raise StateFormatError(f"matrix side {mat.shape[0]} does not equal d_a*d_b = {d_a * d_b}")
    cls = DensityOperator if density else HermitianOperator
    try:
        return cls(d_a, d_b, mat)
    except ValueError as exc:
        raise StateFormatError(str(exc)) from None
