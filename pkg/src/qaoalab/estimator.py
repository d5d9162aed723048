"""Scikit-learn style front end for the QAOA pipeline."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import InstanceError, check_square
from .ising import IsingModel, to_ising
from .optim import OptimizerConfig, init_params, minimize
from .postproc import PostprocConfig, SolveReport, candidates_from, select_best, shots_for_coverage
from .qubo import QuboProblem
from .simulator import (
    DEFAULT_MAX_QUBITS,
    QaoaParams,
    evolve,
    exact_distribution,
    expectation,
    precompute_energies,
    sample,
)


def _as_problem(X):
    if isinstance(X, (QuboProblem, IsingModel)):
        return X
    return QuboProblem(check_square(X, "Q", dtype=float))


def split_seed(seed, n: int = 2) -> list[int]:
    """Independent child seeds derived deterministically from ``seed``."""
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(n)]


class QAOASolver(BaseEstimator):
    """Fit QAOA angles to a QUBO or Ising cost, then sample or solve.

    Parameters
    ----------
    p : int
        Number of cost/mixer repetitions.
    max_evals : int
        Budget of objective evaluations for the classical optimiser.
    initial_step : float
        Initial trust-region radius of the optimiser.
    tol : float or None
        Optimiser stopping radius; ``None`` runs until the budget is spent
        or the radius collapses.
    random_state : int or None
        Seeds the angle initialisation (and sampling, unless overridden).
    max_qubits : int
        Refuse problems larger than this.

    Attributes
    ----------
    problem_ : QuboProblem or IsingModel
    ising_ : IsingModel
    energies_ : EnergyTable
    trace_ : OptimizationTrace
    params_ : QaoaParams
        Best angles found.
    state_ : Statevector
        Final state at ``params_``.
    """

    def __init__(
        self,
        p=5,
        max_evals=1000,
        initial_step=1.0,
        tol=None,
        random_state=None,
        max_qubits=DEFAULT_MAX_QUBITS,
    ):
        self.p = p
        self.max_evals = max_evals
        self.initial_step = initial_step
        self.tol = tol
        self.random_state = random_state
        self.max_qubits = max_qubits

    def _seeds(self):
        return split_seed(self.random_state)

    def fit(self, X, y=None):
        problem = _as_problem(X)
        self.problem_ = problem
        self.ising_ = problem if isinstance(problem, IsingModel) else to_ising(problem)
        self.energies_ = precompute_energies(self.ising_, self.max_qubits)
        self.n_qubits_ = self.energies_.n_qubits

        init_seed, _ = self._seeds()
        x0 = init_params(self.p, init_seed)
        config = OptimizerConfig(self.max_evals, self.initial_step, self.tol, init_seed)
        table = self.energies_
        self.trace_ = minimize(
            lambda v: expectation(evolve(table, QaoaParams.from_vector(v)), table), x0, config
        )
        if self.trace_.best_params is None:
            raise InstanceError(f"optimisation produced no finite evaluation: {self.trace_.error}")
        self.params_ = QaoaParams.from_vector(self.trace_.best_params)
        self.state_ = evolve(table, self.params_)
        return self

    def score(self, X=None, y=None):
        """Negative expected energy of the fitted state (higher is better)."""
        check_is_fitted(self, "state_")
        return -expectation(self.state_, self.energies_)

    def predict_proba(self, X=None):
        """Dense probability vector over all ``2^n`` basis states."""
        check_is_fitted(self, "state_")
        return self.state_.probabilities()

    def predict(self, X=None):
        """Most probable bitstring as an integer encoding (smallest on ties)."""
        return int(np.argmax(self.predict_proba()))

    def distribution(self, shots="exact", seed=None):
        check_is_fitted(self, "state_")
        if shots == "exact":
            return exact_distribution(self.state_)
        if seed is None:
            seed = self._seeds()[1]
        return sample(self.state_, shots, seed)

    def solve(self, shots="exact", postproc=None, seed=None) -> SolveReport:
        """Sample (or take exact probabilities), filter and score candidates."""
        check_is_fitted(self, "state_")
        if not isinstance(self.problem_, QuboProblem):
            raise InstanceError("solve needs the solver to be fitted on a QuboProblem")
        if isinstance(postproc, str):
            postproc = PostprocConfig.parse(postproc)
        postproc = postproc or PostprocConfig()
        if seed is None:
            seed = self._seeds()[1]
        if postproc.mode == "coverage":
            shots = shots_for_coverage(self.state_, postproc.value, seed)
        dist = self.distribution(shots, seed)
        report = select_best(candidates_from(dist, postproc), self.problem_)
        report.shots_used = "exact" if dist.exact else dist.shots
        return report
