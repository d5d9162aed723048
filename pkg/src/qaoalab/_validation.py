"""Exceptions and input validation helpers shared across the package."""

from __future__ import annotations

import numbers

import numpy as np


class InstanceError(ValueError):
    """Malformed or inconsistent problem data (shapes, indices, lengths)."""


class CapacityError(RuntimeError):
    """A requested enumeration or simulation exceeds its configured bound."""


class InfeasibleTargetError(ValueError):
    """A coverage target cannot be met by the given state."""

    def __init__(self, message: str, max_coverage: float):
        super().__init__(message)
        self.max_coverage = max_coverage


def check_square(a, name: str, *, nonnegative: bool = False, dtype=None) -> np.ndarray:
    arr = np.asarray(a, dtype=dtype)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InstanceError(f"{name} must be a square matrix, got shape {arr.shape}")
    if not np.issubdtype(arr.dtype, np.number):
        raise InstanceError(f"{name} must be numeric")
    if not np.all(np.isfinite(arr)):
        raise InstanceError(f"{name} contains non-finite entries")
    if nonnegative and np.any(arr < 0):
        raise InstanceError(f"{name} has negative entries")
    return arr


def check_bits(x, n_bits: int) -> np.ndarray:
    """Return ``x`` as a uint8 0/1 vector of length ``n_bits``.

    Accepts sequences of 0/1 or a string of '0'/'1' characters (first
    character is bit 0).
    """
    if isinstance(x, str):
        if set(x) - {"0", "1"}:
            raise InstanceError(f"bitstring may only contain 0/1, got {x!r}")
        arr = np.frombuffer(x.encode(), dtype=np.uint8) - ord("0")
    else:
        arr = np.asarray(x)
        if arr.ndim != 1:
            raise InstanceError("bit vector must be one-dimensional")
        if arr.size and not np.all((arr == 0) | (arr == 1)):
            raise InstanceError("bit vector entries must be 0 or 1")
        arr = arr.astype(np.uint8)
    if arr.size != n_bits:
        raise InstanceError(f"expected {n_bits} bits, got {arr.size}")
    return arr


def check_shots(shots) -> int:
    if isinstance(shots, bool) or not isinstance(shots, numbers.Integral):
        raise InstanceError(f"shots must be a positive integer, got {shots!r}")
    if shots < 1:
        raise InstanceError(f"shots must be >= 1, got {shots}")
    return int(shots)


def check_probability(value, name: str, *, allow_zero: bool = False) -> float:
    value = float(value)
    lo_ok = value >= 0 if allow_zero else value > 0
    if not (lo_ok and value <= 1):
        interval = "[0, 1]" if allow_zero else "(0, 1]"
        raise InstanceError(f"{name} must lie in {interval}, got {value}")
    return value
