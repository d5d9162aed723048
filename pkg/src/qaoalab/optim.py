"""Derivative-free minimisation of QAOA objectives.

The search itself is scipy's COBYLA (linear-approximation trust region).
This module adds a hard evaluation budget, a full trajectory record and
abort-on-non-finite handling around it.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from ._validation import InstanceError
from .simulator import QaoaParams

# COBYLA's trust radius floor when no tolerance is requested
_NO_TOLERANCE_RHOEND = 1e-12


@dataclass(frozen=True)
class OptimizerConfig:
    max_evals: int = 1000
    initial_step: float = 1.0
    tolerance: float | None = None
    seed: int = 0

    def __post_init__(self):
        if int(self.max_evals) < 1:
            raise InstanceError("max_evals must be >= 1")
        if not self.initial_step > 0:
            raise InstanceError("initial_step must be positive")
        if self.tolerance is not None and not self.tolerance > 0:
            raise InstanceError("tolerance must be positive when given")


@dataclass
class OptimizationTrace:
    evaluations: list = field(default_factory=list)
    best_params: np.ndarray | None = None
    best_value: float = math.inf
    error: str | None = None

    @property
    def n_evals(self) -> int:
        return len(self.evaluations)

    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.evaluations])

    def best_so_far(self) -> np.ndarray:
        return np.minimum.accumulate(self.values())

    def write_csv(self, path) -> None:
        width = len(self.evaluations[0][0]) if self.evaluations else 0
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["eval_index", *[f"param_{k}" for k in range(width)], "objective"])
            for i, (params, value) in enumerate(self.evaluations):
                writer.writerow([i, *(repr(float(x)) for x in params), repr(float(value))])


def init_params(p: int, seed=None) -> QaoaParams:
    """Angles drawn uniformly from ``[-2*pi, 2*pi]``."""
    if p < 1:
        raise InstanceError("p must be >= 1")
    rng = np.random.default_rng(seed)
    return QaoaParams.from_vector(rng.uniform(-2 * np.pi, 2 * np.pi, 2 * p))


class _Stop(Exception):
    pass


def minimize(objective, x0, config: OptimizerConfig | None = None) -> OptimizationTrace:
    """Minimise ``objective`` (a function of the flat parameter vector).

    Never calls ``objective`` more than ``config.max_evals`` times. A
    non-finite objective value stops the run and sets ``trace.error``.
    """
    config = config or OptimizerConfig()
    x0 = x0.to_vector() if isinstance(x0, QaoaParams) else np.asarray(x0, dtype=float)
    trace = OptimizationTrace()

    def wrapped(v):
        if trace.n_evals >= config.max_evals:
            raise _Stop
        v = np.array(v, dtype=float)
        value = float(objective(v))
        if not math.isfinite(value):
            trace.error = f"objective returned {value} at evaluation {trace.n_evals}"
            raise _Stop
        trace.evaluations.append((v, value))
        if value < trace.best_value:
            trace.best_value, trace.best_params = value, v
        return value

    tol = config.tolerance if config.tolerance is not None else _NO_TOLERANCE_RHOEND
    try:
        _scipy_minimize(
            wrapped,
            x0,
            method="COBYLA",
            options={
                # scipy wants room for its initial simplex; the wrapper enforces the real cap
                "maxiter": max(int(config.max_evals), x0.size + 2),
                "rhobeg": float(config.initial_step),
                "tol": tol,
            },
        )
    except _Stop:
        pass
    return trace
