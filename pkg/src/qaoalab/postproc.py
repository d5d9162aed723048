"""Turning an outcome distribution into a solution.

Candidates are chosen from the distribution (probability threshold,
top-k, or an adaptive shot budget that reaches a coverage target), scored
classically on the QUBO, and the cheapest one is reported together with
how much of the state space was examined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import InfeasibleTargetError, InstanceError, check_probability
from .bits import bits_to_str, int_to_bits
from .lar import Assignment
from .qubo import Infeasible, QuboProblem, decode_bits, qubo_values
from .simulator import OutcomeDistribution, Statevector, draw_outcomes

DEFAULT_THRESHOLD = 1e-6
DEFAULT_TOP_K = 10
MAX_ADAPTIVE_SHOTS = 10**8


@dataclass(frozen=True)
class PostprocConfig:
    mode: str = "threshold"
    value: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        if self.mode == "threshold":
            check_probability(self.value, "threshold")
        elif self.mode == "topk":
            if int(self.value) != self.value or self.value < 1:
                raise InstanceError(f"top-k needs a positive integer k, got {self.value}")
            object.__setattr__(self, "value", int(self.value))
        elif self.mode == "coverage":
            check_probability(self.value, "coverage target")
        else:
            raise InstanceError(f"unknown post-processing mode {self.mode!r}")

    @classmethod
    def parse(cls, text: str) -> "PostprocConfig":
        """Parse ``threshold:<theta>``, ``topk:<k>`` or ``coverage:<c>``."""
        mode, _, arg = text.partition(":")
        mode = mode.strip().lower()
        defaults = {"threshold": DEFAULT_THRESHOLD, "topk": DEFAULT_TOP_K}
        if not arg:
            if mode not in defaults:
                raise InstanceError(f"post-processing mode {mode!r} needs a value")
            return cls(mode, defaults[mode])
        try:
            value = int(arg) if mode == "topk" else float(arg)
        except ValueError as exc:
            raise InstanceError(f"bad post-processing value {arg!r}") from exc
        return cls(mode, value)

    def __str__(self):
        return f"{self.mode}:{self.value}"


@dataclass
class SolveReport:
    best_state: int
    n_qubits: int
    objective: float
    feasible: bool
    decoded: Assignment | Infeasible | None
    states_evaluated: int
    coverage: float = 0.0
    shots_used: int | str = "exact"
    # filled in by full pipeline runs
    trace: object = field(default=None, repr=False)
    state: object = field(default=None, repr=False)
    time_s: float | None = None

    @property
    def best_bits(self) -> str:
        return bits_to_str(int_to_bits(self.best_state, self.n_qubits))

    def to_dict(self) -> dict:
        if isinstance(self.decoded, Assignment):
            decoded = list(self.decoded.layers)
        else:
            decoded = None if self.decoded is None else str(self.decoded)
        return {
            "best_bits": self.best_bits,
            "objective": self.objective,
            "feasible": self.feasible,
            "decoded": decoded,
            "states_evaluated": self.states_evaluated,
            "coverage": self.coverage,
            "shots_used": self.shots_used,
            "optimizer_evals": None if self.trace is None else self.trace.n_evals,
            "best_expectation": None if self.trace is None else self.trace.best_value,
        }


def filter_threshold(dist: OutcomeDistribution, threshold: float = DEFAULT_THRESHOLD) -> np.ndarray:
    return dist.states[dist.probabilities >= threshold]


def top_k(dist: OutcomeDistribution, k: int = DEFAULT_TOP_K) -> np.ndarray:
    if k < 1:
        raise InstanceError("k must be >= 1")
    # states are stored ascending, so a stable sort keeps smaller states first on ties
    order = np.argsort(-dist.probabilities, kind="stable")
    return np.sort(dist.states[order[:k]])


def coverage(candidates, n_qubits: int) -> float:
    if n_qubits < 1:
        raise InstanceError("n_qubits must be >= 1")
    return len(candidates) / float(1 << n_qubits)


def select_best(candidates, q: QuboProblem) -> SolveReport:
    """Score every candidate and return the cheapest (smallest state on ties)."""
    states = np.unique(np.asarray(candidates, dtype=np.int64))
    if states.size == 0:
        raise InstanceError("no candidates to evaluate")
    values = qubo_values(q, states)
    k = int(np.argmin(values))
    best = int(states[k])
    decoded = decode_bits(int_to_bits(best, q.n_vars), q.m, q.n) if q.m else None
    return SolveReport(
        best_state=best,
        n_qubits=q.n_vars,
        objective=float(values[k]),
        feasible=isinstance(decoded, Assignment),
        decoded=decoded,
        states_evaluated=int(states.size),
        coverage=coverage(states, q.n_vars),
    )


def shots_for_coverage(
    state: Statevector, target: float, seed=None, max_shots: int = MAX_ADAPTIVE_SHOTS
) -> int:
    """Smallest shot count whose sample (under ``seed``) covers ``target`` of the states.

    Draws come from the same stream :func:`~qaoalab.simulator.sample` uses,
    so ``sample(state, S, seed)`` with the returned ``S`` meets the target.
    """
    target = check_probability(target, "coverage target")
    dim = 1 << state.n_qubits
    need = math.ceil(target * dim - 1e-9)
    probs = state.probabilities()
    reachable = int(np.count_nonzero(probs))
    if need > reachable:
        raise InfeasibleTargetError(
            f"coverage {target} unreachable: at most {reachable / dim:.6g} of states have "
            "non-zero probability",
            reachable / dim,
        )
    rng = np.random.default_rng(seed)
    seen = np.zeros(dim, dtype=bool)
    distinct = consumed = 0
    for idx in draw_outcomes(probs, max_shots, rng):
        uniq, first = np.unique(idx, return_index=True)
        fresh = ~seen[uniq]
        if distinct + int(fresh.sum()) >= need:
            firsts = np.sort(first[fresh])
            return consumed + int(firsts[need - distinct - 1]) + 1
        seen[uniq] = True
        distinct += int(fresh.sum())
        consumed += idx.size
    raise InfeasibleTargetError(
        f"coverage {target} not reached within {max_shots} shots "
        f"(got {distinct / dim:.6g})",
        distinct / dim,
    )


def candidates_from(dist: OutcomeDistribution, config: PostprocConfig) -> np.ndarray:
    """Candidate states for ``threshold`` and ``topk`` modes.

    In ``coverage`` mode the shot budget was already sized to the target,
    so every observed outcome is a candidate.
    """
    if config.mode == "threshold":
        return filter_threshold(dist, config.value)
    if config.mode == "topk":
        return top_k(dist, config.value)
    return dist.states
