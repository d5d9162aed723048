"""Bit-order convention.

Variable ``b`` of a binary vector is bit ``b`` of the integer encoding
(least-significant first) and character ``b`` of the canonical bitstring.
For layer assignment problems ``b = package * n_layers + layer``.
"""

from __future__ import annotations

import numpy as np


def int_to_bits(s: int, n_bits: int) -> np.ndarray:
    return ((int(s) >> np.arange(n_bits)) & 1).astype(np.uint8)


def bits_to_int(x) -> int:
    return sum(int(b) << i for i, b in enumerate(x))


def bits_to_str(x) -> str:
    return "".join("1" if b else "0" for b in x)


def str_to_bits(text: str) -> np.ndarray:
    return np.array([int(c) for c in text], dtype=np.uint8)


def bit_matrix(states, n_bits: int) -> np.ndarray:
    """Rows are the bit vectors of the integers in ``states``."""
    states = np.asarray(states, dtype=np.int64)
    return ((states[:, None] >> np.arange(n_bits, dtype=np.int64)) & 1).astype(np.uint8)
