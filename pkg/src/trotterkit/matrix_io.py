"""Shared JSON encoding for matrices and vectors.

A matrix is ``{"dim": n, "re": [[...]], "im": [[...]]}`` with row-major real
and imaginary parts. Vectors (wavefunction snapshots) use the same keys with
flat ``re``/``im`` lists.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .linalg import LinalgError


class MatrixFormatError(LinalgError):
    pass


def fmt_float(x: float) -> str:
    """17 significant digits: enough to round-trip any double."""
    return format(float(x), ".17g")


def matrix_to_json(a) -> dict:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise MatrixFormatError(f"expected a square matrix, got shape {m.shape}")
    return {
        "dim": int(m.shape[0]),
        "re": [[float(v) for v in row] for row in m.real],
        "im": [[float(v) for v in row] for row in m.imag],
    }


def vector_to_json(v) -> dict:
    x = np.asarray(v, dtype=np.complex128)
    return {
        "dim": int(x.size),
        "re": [float(r) for r in x.real],
        "im": [float(i) for i in x.imag],
    }


def _real_grid(obj, key: str, dim: int) -> np.ndarray:
    rows = obj.get(key)
    if not isinstance(rows, list) or len(rows) != dim:
        raise MatrixFormatError(f"'{key}' must be a list of {dim} rows")
    for r in rows:
        if not isinstance(r, list) or len(r) != dim:
            raise MatrixFormatError(f"'{key}' is not {dim}x{dim}")
    try:
        arr = np.array(rows, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise MatrixFormatError(f"'{key}' holds non-numeric entries") from exc
    if not np.all(np.isfinite(arr)):
        raise MatrixFormatError(f"'{key}' holds NaN or infinite entries")
    return arr


def matrix_from_json(obj) -> np.ndarray:
    """Parse the JSON matrix object; reject non-square or non-finite payloads."""
    if not isinstance(obj, dict):
        raise MatrixFormatError("matrix payload must be a JSON object")
    dim = obj.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise MatrixFormatError("'dim' must be a positive integer")
    re = _real_grid(obj, "re", dim)
    im = _real_grid(obj, "im", dim) if "im" in obj else np.zeros_like(re)
    return re + 1j * im


def vector_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise MatrixFormatError("vector payload must be a JSON object")
    dim = obj.get("dim")
    re, im = obj.get("re"), obj.get("im")
    if not isinstance(dim, int) or not isinstance(re, list) or not isinstance(im, list):
        raise MatrixFormatError("vector payload needs 'dim', 're' and 'im'")
    if len(re) != dim or len(im) != dim:
        raise MatrixFormatError("vector length does not match 'dim'")
    out = np.array(re, dtype=np.float64) + 1j * np.array(im, dtype=np.float64)
    if not np.all(np.isfinite(out)):
        raise MatrixFormatError("vector holds NaN or infinite entries")
    return out


def dumps(obj) -> str:
    # allow_nan=False: NaN has no JSON spelling, callers must map it to null
    return json.dumps(obj, allow_nan=False, indent=None, separators=(",", ":")) + "\n"


def load_matrix(path) -> np.ndarray:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MatrixFormatError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"{path}: invalid JSON ({exc})") from exc
    return matrix_from_json(obj)


def save_matrix(path, a) -> None:
    Path(path).write_text(dumps(matrix_to_json(a)))


def _reject_constant(name: str):
    raise MatrixFormatError(f"non-finite constant {name} in matrix payload")

