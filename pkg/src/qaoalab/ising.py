"""Two-body Ising form of a QUBO.

Spins follow the Pauli-Z eigenvalue convention: ``z = 1 - 2x``, so bit 0
is spin +1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import InstanceError, check_bits
from .qubo import QuboProblem

COUPLING_CUTOFF = 1e-12


@dataclass(frozen=True)
class IsingModel:
    h: np.ndarray
    J: dict = field(default_factory=dict)
    offset: float = 0.0

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float).copy()
        if h.ndim != 1:
            raise InstanceError("h must be a vector")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)
        J = {}
        for (i, j), v in dict(self.J).items():
            i, j = int(i), int(j)
            if not 0 <= i < j < h.size:
                raise InstanceError(f"coupling key ({i}, {j}) must satisfy 0 <= i < j < {h.size}")
            J[(i, j)] = float(v)
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def n_spins(self) -> int:
        return self.h.size

    def coupling_arrays(self):
        """``(rows, cols, values)`` of the couplings in sorted key order."""
        keys = sorted(self.J)
        rows = np.array([k[0] for k in keys], dtype=np.int64)
        cols = np.array([k[1] for k in keys], dtype=np.int64)
        vals = np.array([self.J[k] for k in keys], dtype=float)
        return rows, cols, vals

    def to_dict(self) -> dict:
        rows, cols, vals = self.coupling_arrays()
        return {
            "n": self.n_spins,
            "h": self.h.tolist(),
            "J": [[int(i), int(j), float(v)] for i, j, v in zip(rows, cols, vals)],
            "offset": self.offset,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "IsingModel":
        model = cls(data["h"], {(i, j): v for i, j, v in data.get("J", [])}, data.get("offset", 0.0))
        if "n" in data and int(data["n"]) != model.n_spins:
            raise InstanceError("'n' disagrees with the length of 'h'")
        return model


def to_ising(q: QuboProblem) -> IsingModel:
    Q = q.Q
    diag = np.diag(Q)
    off = Q - np.diag(diag)
    h = -0.5 * diag - 0.5 * off.sum(axis=1)
    iu, ju = np.triu_indices(q.n_vars, k=1)
    upper = Q[iu, ju]
    offset = q.offset + 0.5 * diag.sum() + 0.5 * upper.sum()
    keep = np.abs(upper) >= COUPLING_CUTOFF
    J = {(int(i), int(j)): 0.5 * float(v) for i, j, v in zip(iu[keep], ju[keep], upper[keep])}
    return IsingModel(h, J, offset)


def ising_energy(model: IsingModel, x) -> float:
    z = 1.0 - 2.0 * check_bits(x, model.n_spins)
    energy = model.offset + float(model.h @ z)
    for (i, j), v in model.J.items():
        energy += v * z[i] * z[j]
    return energy
