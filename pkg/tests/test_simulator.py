import time

import numpy as np
import pytest
from scipy.linalg import expm

from qaoalab._validation import CapacityError, InstanceError
from qaoalab.bits import int_to_bits
from qaoalab.ising import IsingModel, ising_energy
from qaoalab.simulator import (
    EnergyTable,
    OutcomeDistribution,
    QaoaParams,
    Statevector,
    evolve,
    exact_distribution,
    expectation,
    initial_state,
    precompute_energies,
    sample,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)


def random_model(rng, n, density=0.5, scale=1.0):
    J = {
        (i, j): scale * rng.normal()
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < density
    }
    return IsingModel(scale * rng.normal(size=n), J, offset=rng.normal())


def dense_qaoa(model, params):
    """Independent route: explicit 2^n x 2^n operators and matrix exponentials."""
    n = model.n_spins
    H = np.diag([ising_energy(model, int_to_bits(s, n)) for s in range(1 << n)]).astype(complex)
    mixer = np.zeros((1 << n, 1 << n), dtype=complex)
    for q in range(n):
        ops = [np.eye(2)] * n
        ops[n - 1 - q] = X  # kron order puts bit n-1 leftmost
        term = ops[0]
        for op in ops[1:]:
            term = np.kron(term, op)
        mixer += term
    psi = np.full(1 << n, 2 ** (-n / 2), dtype=complex)
    for g, b in zip(params.gammas, params.betas):
        psi = expm(-1j * b * mixer) @ (expm(-1j * g * H) @ psi)
    return psi


def single_qubit_probs(gamma, beta):
    a = np.sin(2 * beta) * np.sin(2 * gamma)
    return 0.5 * (1 + a), 0.5 * (1 - a)


def test_energy_table_matches_direct(rng):
    for n in (1, 3, 7):
        model = random_model(rng, n)
        table = precompute_energies(model)
        assert table.energies.shape == (1 << n,)
        for s in rng.integers(0, 1 << n, 10):
            assert abs(table.energies[s] - ising_energy(model, int_to_bits(s, n))) < 1e-12


def test_trivial_table():
    t = precompute_energies(IsingModel([0.0], offset=2.5))
    np.testing.assert_array_equal(t.energies, [2.5, 2.5])


def test_reference_table_size(ref_table):
    assert ref_table.energies.size == 32768


def test_energy_cap():
    with pytest.raises(CapacityError):
        precompute_energies(IsingModel(np.zeros(5)), max_qubits=4)


@pytest.mark.parametrize("n", [1, 2, 15])
def test_initial_state(n):
    st = initial_state(n)
    np.testing.assert_allclose(st.amplitudes, 2 ** (-n / 2), rtol=0, atol=1e-15)
    assert abs(np.vdot(st.amplitudes, st.amplitudes) - 1) < 1e-12
    assert np.all(st.amplitudes.imag == 0)


def test_initial_state_rejects_zero():
    with pytest.raises(InstanceError):
        initial_state(0)


def test_statevector_must_be_normalised():
    with pytest.raises(InstanceError):
        Statevector(np.ones(4), 2)
    with pytest.raises(InstanceError):
        Statevector(np.ones(3) / np.sqrt(3), 2)


def test_params_validation():
    with pytest.raises(InstanceError):
        QaoaParams([0.1, 0.2], [0.3])
    p = QaoaParams.from_vector([1, 2, 3, 4])
    np.testing.assert_array_equal(p.gammas, [1, 2])
    np.testing.assert_array_equal(p.betas, [3, 4])
    np.testing.assert_array_equal(p.to_vector(), [1, 2, 3, 4])


def test_identity_evolutions(rng):
    model = random_model(rng, 6)
    start = initial_state(6).amplitudes
    np.testing.assert_array_equal(evolve(model, QaoaParams(np.zeros(4), np.zeros(4))).amplitudes, start)
    np.testing.assert_array_equal(evolve(model, QaoaParams([], [])).amplitudes, start)


@pytest.mark.parametrize("gamma,beta", [(0.3, 0.7), (-1.2, 2.5), (np.pi / 4, np.pi / 4)])
def test_single_qubit_closed_form(gamma, beta):
    model = IsingModel([1.0])
    state = evolve(model, QaoaParams([gamma], [beta]))
    p0, p1 = single_qubit_probs(gamma, beta)
    np.testing.assert_allclose(state.probabilities(), [p0, p1], atol=1e-12)
    table = precompute_energies(model)
    assert abs(expectation(state, table) - np.sin(2 * beta) * np.sin(2 * gamma)) < 1e-12
    dist = exact_distribution(state)
    assert abs(dist.as_dict()[0] - p0) < 1e-12


@pytest.mark.parametrize("n,p", [(1, 2), (2, 1), (3, 3), (5, 2), (6, 4), (7, 1)])
def test_matches_dense_matrix_exponentials(n, p):
    rng = np.random.default_rng(n * 31 + p)
    model = random_model(rng, n)
    params = QaoaParams(rng.uniform(-3, 3, p), rng.uniform(-3, 3, p))
    np.testing.assert_allclose(evolve(model, params).amplitudes, dense_qaoa(model, params), atol=1e-10)


def test_norm_preserved_random(rng):
    for _ in range(10):
        n = int(rng.integers(1, 16))
        p = int(rng.integers(1, 9))
        model = random_model(rng, n, density=0.3, scale=rng.choice([1.0, 100.0]))
        st = evolve(model, QaoaParams(rng.uniform(-7, 7, p), rng.uniform(-7, 7, p)))
        assert abs(np.vdot(st.amplitudes, st.amplitudes).real - 1) < 1e-9


def test_offset_only_changes_global_phase(rng):
    base = random_model(rng, 8)
    shifted = IsingModel(base.h, base.J, base.offset + 17.25)
    params = QaoaParams(rng.uniform(-2, 2, 3), rng.uniform(-2, 2, 3))
    a = evolve(base, params).amplitudes
    b = evolve(shifted, params).amplitudes
    phase = np.vdot(a, b)
    assert abs(abs(phase) - 1) < 1e-10
    np.testing.assert_allclose(b, phase * a, atol=1e-10)


def test_mixer_only_keeps_uniform(rng):
    model = random_model(rng, 9)
    st = evolve(model, QaoaParams(np.zeros(3), rng.uniform(-3, 3, 3)))
    np.testing.assert_allclose(st.probabilities(), 1 / 512, atol=1e-12)


def test_expectation_basics(rng):
    table = EnergyTable(rng.normal(size=16), 4)
    assert abs(expectation(initial_state(4), table) - table.energies.mean()) < 1e-12
    basis = np.zeros(16, dtype=complex)
    basis[5] = 1
    assert expectation(Statevector(basis, 4), table) == table.energies[5]
    with pytest.raises(InstanceError):
        expectation(initial_state(3), table)


def test_exact_distribution_basics():
    d = exact_distribution(initial_state(2))
    assert d.exact and d.as_dict() == pytest.approx({0: 0.25, 1: 0.25, 2: 0.25, 3: 0.25})
    basis = np.zeros(8, dtype=complex)
    basis[6] = 1j
    assert exact_distribution(Statevector(basis, 3)).as_dict() == {6: 1.0}


def _basis(n, s):
    amps = np.zeros(1 << n, dtype=complex)
    amps[s] = 1
    return Statevector(amps, n)


def test_sample_basis_state():
    d = sample(_basis(4, 9), 1000, seed=1)
    assert d.as_dict() == {9: 1.0}
    assert d.shots == 1000 and list(d.counts) == [1000]


def test_sample_fair_coin():
    d = sample(initial_state(1), 10**6, seed=7)
    assert abs(d.as_dict()[0] - 0.5) < 0.005


def test_sample_deterministic_and_multiples(rng):
    st = evolve(random_model(rng, 6), QaoaParams([0.4], [0.3]))
    a, b = sample(st, 5000, seed=3), sample(st, 5000, seed=3)
    np.testing.assert_array_equal(a.states, b.states)
    np.testing.assert_array_equal(a.counts, b.counts)
    assert abs(a.probabilities.sum() - 1) < 1e-9
    np.testing.assert_allclose(a.probabilities * 5000, np.round(a.probabilities * 5000), atol=1e-9)


def test_sample_never_returns_zero_probability_states():
    amps = np.zeros(8, dtype=complex)
    amps[[1, 4]] = np.sqrt(0.5)
    d = sample(Statevector(amps, 3), 20000, seed=0)
    assert set(d.states) == {1, 4}


def test_sample_rejects_zero_shots():
    with pytest.raises(InstanceError):
        sample(initial_state(2), 0)


def test_sample_uniform_15_distinct_count():
    d = sample(initial_state(15), 10_000, seed=11)
    # expected distinct outcomes 2^15 (1 - (1 - 2^-15)^10000) ~ 8650
    assert 8000 < len(d) < 10000


def test_sampling_converges_to_exact(ref_table, rng):
    params = QaoaParams(rng.uniform(-0.01, 0.01, 2), rng.uniform(-1, 1, 2))
    st = evolve(ref_table, params)
    exact = st.probabilities()
    d = sample(st, 10**6, seed=5)
    emp = np.zeros_like(exact)
    emp[d.states] = d.probabilities
    assert 0.5 * np.abs(emp - exact).sum() < 0.1


def test_statevector_dump_roundtrip(rng):
    import json

    st = evolve(random_model(rng, 3), QaoaParams([0.2], [0.9]))
    pairs = json.loads(st.to_json())
    np.testing.assert_allclose([complex(r, i) for r, i in pairs], st.amplitudes)


def test_evolve_time_scaling():
    rng = np.random.default_rng(0)
    times = {}
    for n in (14, 18):
        table = precompute_energies(random_model(rng, n, density=0.1))
        params = QaoaParams(rng.normal(size=3), rng.normal(size=3))
        runs = []
        for _ in range(5):
            start = time.perf_counter()
            evolve(table, params)
            runs.append(time.perf_counter() - start)
        times[n] = np.median(runs)
    per_qubit = (times[18] / times[14]) ** 0.25
    assert 1.6 <= per_qubit <= 3.0, per_qubit


def test_outcome_distribution_len():
    d = OutcomeDistribution(np.array([1, 3]), np.array([0.5, 0.5]), 2)
    assert len(d) == 2 and d.exact
