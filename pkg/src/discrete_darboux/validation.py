"""Input validation helpers shared across the package."""

from __future__ import annotations

import numpy as np


def as_float_array(x, name: str) -> np.ndarray:
    """Coerce to a 1-D float64 array and reject non-finite entries."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_complex_array(x, name: str) -> np.ndarray:
    """Coerce to a 1-D complex128 array and reject non-finite entries."""
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_same_length(n: int, *arrays_and_names) -> None:
    for arr, name in arrays_and_names:
        if len(arr) != n:
            raise ValueError(f"{name} has length {len(arr)}, expected {n}")


def check_nodeless(values: np.ndarray, name: str = "seed") -> None:
    """Reject sequences with zero entries; every transform formula divides by them."""
    zeros = np.flatnonzero(values == 0)
    if zeros.size:
        raise ValueError(f"{name} is not nodeless: zero entry at index {zeros[0]}")
