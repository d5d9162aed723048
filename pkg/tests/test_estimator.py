import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from qaoalab._validation import InstanceError
from qaoalab.estimator import QAOASolver, split_seed
from qaoalab.ising import to_ising
from qaoalab.lar import DependencyGraph, LayerPolicy
from qaoalab.qubo import QuboProblem, encode_qubo
from qaoalab.simulator import sample


@pytest.fixture(scope="module")
def small_qubo():
    W = np.array([[0, 5], [2, 0]])
    return encode_qubo(DependencyGraph(W), LayerPolicy.from_penalties(2))


def test_params_api():
    s = QAOASolver(p=3, max_evals=20, random_state=4)
    assert s.get_params()["p"] == 3
    s.set_params(p=2)
    c = clone(s)
    assert c.p == 2 and c.random_state == 4 and not hasattr(c, "state_")


def test_not_fitted():
    with pytest.raises(NotFittedError):
        QAOASolver().predict_proba()


def test_fit_small(small_qubo):
    s = QAOASolver(p=2, max_evals=60, random_state=1).fit(small_qubo)
    assert s.n_qubits_ == 4
    assert s.trace_.n_evals <= 60
    probs = s.predict_proba()
    assert abs(probs.sum() - 1) < 1e-9
    assert s.predict() == int(np.argmax(probs))
    assert s.score() == pytest.approx(-s.trace_.best_value)


def test_fit_is_deterministic(small_qubo):
    a = QAOASolver(p=2, max_evals=40, random_state=7).fit(small_qubo)
    b = QAOASolver(p=2, max_evals=40, random_state=7).fit(small_qubo)
    np.testing.assert_array_equal(a.params_.to_vector(), b.params_.to_vector())
    np.testing.assert_array_equal(a.state_.amplitudes, b.state_.amplitudes)


def test_fit_accepts_matrix_and_ising(small_qubo):
    s = QAOASolver(p=1, max_evals=10, random_state=0).fit(small_qubo.Q)
    assert isinstance(s.problem_, QuboProblem)
    s = QAOASolver(p=1, max_evals=10, random_state=0).fit(to_ising(small_qubo))
    with pytest.raises(InstanceError):
        s.solve()


def test_offset_does_not_change_argmin(small_qubo):
    shifted = QuboProblem(small_qubo.Q, small_qubo.offset + 1000.0, small_qubo.penalty_coeff, 2, 2)
    a = QAOASolver(p=2, max_evals=80, random_state=3).fit(small_qubo)
    b = QAOASolver(p=2, max_evals=80, random_state=3).fit(shifted)
    assert a.solve().best_state == b.solve().best_state
    assert b.solve().objective - a.solve().objective == pytest.approx(1000.0)


def test_solve_modes(small_qubo):
    s = QAOASolver(p=2, max_evals=40, random_state=2).fit(small_qubo)
    exact = s.solve()
    assert exact.shots_used == "exact" and exact.feasible
    sampled = s.solve(shots=500, postproc="topk:2")
    assert sampled.shots_used == 500 and sampled.states_evaluated <= 2
    cov = s.solve(postproc="coverage:0.5")
    assert isinstance(cov.shots_used, int) and cov.coverage >= 0.5


def test_split_seed_deterministic():
    assert split_seed(5) == split_seed(5)
    assert split_seed(5) != split_seed(6)


def test_reference_fit_finds_optimum_exactly(fitted_ref):
    r = fitted_ref.solve()
    assert r.objective == 561 and r.feasible
    assert r.coverage > 0.9


def _tv(state, shots, seed):
    exact = state.probabilities()
    d = sample(state, shots, seed=seed)
    emp = np.zeros_like(exact)
    emp[d.states] = d.probabilities
    return 0.5 * np.abs(emp - exact).sum(), exact


def test_sampling_tv_tracks_binomial_expectation(fitted_ref):
    tv, p = _tv(fitted_ref.state_, 10**6, seed=1)
    # E|count/S - p| ~ sqrt(2 p (1 - p) / (pi S)) for each outcome
    expected = 0.5 * np.sum(np.sqrt(2 * p * (1 - p) / (np.pi * 10**6)))
    assert abs(tv - expected) < 0.1 * expected
    tv_small, _ = _tv(fitted_ref.state_, 10**4, seed=1)
    assert tv < tv_small


@pytest.mark.xfail(
    strict=True,
    reason="the optimised 15-qubit state is diffuse (max probability ~5e-4); the binomial "
    "expectation of the TV distance at 1e6 shots is ~0.06, so a 0.01 bound cannot hold",
)
def test_sampling_tv_below_one_percent_at_1e6_shots(fitted_ref):
    tv, _ = _tv(fitted_ref.state_, 10**6, seed=1)
    assert tv < 0.01


def test_coverage_monotone_in_shots_on_optimised_state(fitted_ref):
    means = [
        np.mean([len(fitted_ref.distribution(S, seed=k)) for k in range(10)])
        for S in (1_000, 10_000, 100_000)
    ]
    assert means[0] <= means[1] <= means[2]
