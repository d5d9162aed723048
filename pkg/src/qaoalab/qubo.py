"""One-hot penalty QUBO encoding of layer assignment problems."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import CapacityError, InstanceError, check_bits, check_square
from .bits import bit_matrix
from .lar import Assignment, DependencyGraph, LayerPolicy


@dataclass(frozen=True)
class QuboProblem:
    """Minimise ``x^T Q x + offset`` over binary ``x``.

    ``m`` and ``n`` record the package/layer grid the variables came from;
    they are 0 for QUBOs not built by :func:`encode_qubo`.
    """

    Q: np.ndarray
    offset: float = 0.0
    penalty_coeff: float = 0.0
    m: int = 0
    n: int = 0

    def __post_init__(self):
        Q = check_square(self.Q, "Q", dtype=float).copy()
        if not np.allclose(Q, Q.T, rtol=0.0, atol=1e-12):
            raise InstanceError("Q must be symmetric")
        if self.m and self.m * self.n != Q.shape[0]:
            raise InstanceError(f"Q is {Q.shape[0]}x{Q.shape[0]} but m*n = {self.m * self.n}")
        Q.setflags(write=False)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def n_vars(self) -> int:
        return self.Q.shape[0]

    def to_dict(self) -> dict:
        return {"n": self.n_vars, "Q": self.Q.tolist(), "offset": self.offset}


def default_penalty(graph: DependencyGraph, policy: LayerPolicy) -> float:
    """Smallest integer-style penalty strictly above every assignment cost."""
    return float(1 + policy.C.max() * graph.W.sum())


def encode_qubo(
    graph: DependencyGraph, policy: LayerPolicy, penalty_coeff: float | None = None
) -> QuboProblem:
    m, n = graph.n_packages, policy.n_layers
    if penalty_coeff is None:
        penalty_coeff = default_penalty(graph, policy)
    elif not penalty_coeff > 0:
        raise InstanceError(f"penalty coefficient must be positive, got {penalty_coeff}")
    P = float(penalty_coeff)
    # A[i*n+k, j*n+l] = W[i,j] * C[k,l]; the zero diagonal of W keeps i == j out
    A = np.kron(graph.W.astype(float), policy.C.astype(float))
    Q = 0.5 * (A + A.T)
    # P * (sum_k x_ik - 1)^2 with x^2 = x folded onto the diagonal
    Q += P * (np.kron(np.eye(m), np.ones((n, n))) - 2.0 * np.eye(m * n))
    return QuboProblem(Q, offset=m * P, penalty_coeff=P, m=m, n=n)


def qubo_value(q: QuboProblem, x) -> float:
    x = check_bits(x, q.n_vars).astype(float)
    return float(x @ q.Q @ x + q.offset)


def qubo_values(q: QuboProblem, states) -> np.ndarray:
    """Vectorised :func:`qubo_value` over integer-encoded bitstrings."""
    X = bit_matrix(states, q.n_vars).astype(float)
    return np.einsum("si,ij,sj->s", X, q.Q, X, optimize=True) + q.offset


@dataclass(frozen=True)
class Infeasible:
    """Decoding failure: ``package`` has no layer or more than one."""

    package: int
    reason: str

    def __str__(self):
        return f"package {self.package} {self.reason}"


def decode_bits(x, m: int, n: int) -> Assignment | Infeasible:
    x = check_bits(x, m * n).reshape(m, n)
    row_sums = x.sum(axis=1)
    for i, total in enumerate(row_sums):
        if total == 0:
            return Infeasible(i, "has no layer")
        if total > 1:
            return Infeasible(i, f"has {int(total)} layers")
    return Assignment(tuple(int(k) for k in x.argmax(axis=1)), n)


def encode_assignment(a: Assignment, n: int) -> np.ndarray:
    return a.to_matrix(n).reshape(-1)


def brute_force_qubo(q: QuboProblem, max_vars: int = 22, chunk_size: int = 1 << 14):
    """Exhaustive minimum of the QUBO; ties go to the smallest integer encoding.

    Returns ``(state, value)``.
    """
    N = q.n_vars
    if N > max_vars:
        raise CapacityError(f"2^{N} bitstrings exceeds enumeration bound 2^{max_vars}")
    best_state, best_val = 0, None
    for start in range(0, 1 << N, chunk_size):
        states = np.arange(start, min(start + chunk_size, 1 << N), dtype=np.int64)
        vals = qubo_values(q, states)
        k = int(np.argmin(vals))
        if best_val is None or vals[k] < best_val:
            best_state, best_val = int(states[k]), float(vals[k])
    return best_state, best_val
