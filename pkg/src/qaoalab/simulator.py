"""Statevector simulation of the QAOA ansatz for diagonal Ising costs.

The cost layer is a phase multiplication by a precomputed energy table;
the transverse-field mixer is applied as a Kronecker product of small
dense blocks so each layer reduces to a handful of BLAS matmuls.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from ._validation import CapacityError, InstanceError, check_shots
from .ising import IsingModel

DEFAULT_MAX_QUBITS = 24
NORM_TOL = 1e-9
# qubits per dense mixer block: 2^5 x 2^5 keeps each matmul cheap
_MIXER_BLOCK = 5
_SAMPLE_CHUNK = 1 << 20


@dataclass(frozen=True)
class QaoaParams:
    gammas: np.ndarray
    betas: np.ndarray

    def __post_init__(self):
        g = np.atleast_1d(np.asarray(self.gammas, dtype=float)).copy()
        b = np.atleast_1d(np.asarray(self.betas, dtype=float)).copy()
        if g.ndim != 1 or g.shape != b.shape:
            raise InstanceError(f"need as many gammas as betas, got {g.shape} and {b.shape}")
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "betas", b)

    @property
    def p(self) -> int:
        return self.gammas.size

    def to_vector(self) -> np.ndarray:
        """Flat layout ``[gamma_1..gamma_p, beta_1..beta_p]``."""
        return np.concatenate([self.gammas, self.betas])

    @classmethod
    def from_vector(cls, v) -> "QaoaParams":
        v = np.asarray(v, dtype=float)
        if v.ndim != 1 or v.size % 2:
            raise InstanceError("parameter vector must have even length")
        p = v.size // 2
        return cls(v[:p], v[p:])


@dataclass(frozen=True)
class Statevector:
    amplitudes: np.ndarray
    n_qubits: int

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.n_qubits,):
            raise InstanceError(f"{self.n_qubits} qubits need {1 << self.n_qubits} amplitudes")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise InstanceError(f"state is not normalised (norm^2 = {norm})")
        object.__setattr__(self, "amplitudes", amps)

    def probabilities(self) -> np.ndarray:
        a = self.amplitudes
        return a.real**2 + a.imag**2

    def to_json(self) -> str:
        return json.dumps([[float(c.real), float(c.imag)] for c in self.amplitudes])


@dataclass(frozen=True)
class EnergyTable:
    """Ising energies of all ``2^n`` basis states, indexed by integer encoding."""

    energies: np.ndarray
    n_qubits: int

    def __post_init__(self):
        if np.shape(self.energies) != (1 << self.n_qubits,):
            raise InstanceError("energy table length must be 2^n_qubits")


@dataclass(frozen=True)
class OutcomeDistribution:
    """Sparse bitstring distribution.

    ``states`` holds integer encodings in increasing order. ``shots`` is
    ``None`` for exact distributions; sampled ones also carry ``counts``.
    """

    states: np.ndarray
    probabilities: np.ndarray
    n_qubits: int
    shots: int | None = None
    seed: object = None
    counts: np.ndarray | None = field(default=None, repr=False)

    @property
    def exact(self) -> bool:
        return self.shots is None

    def __len__(self):
        return self.states.size

    def as_dict(self) -> dict:
        return {int(s): float(p) for s, p in zip(self.states, self.probabilities)}


def precompute_energies(model: IsingModel, max_qubits: int = DEFAULT_MAX_QUBITS) -> EnergyTable:
    N = model.n_spins
    if N > max_qubits:
        raise CapacityError(f"{N} qubits exceeds simulator cap of {max_qubits}")
    s = np.arange(1 << N, dtype=np.int64)

    cache = {}

    def spin(b):
        if b in cache:
            return cache[b]
        z = 1 - 2 * ((s >> b) & 1).astype(np.int8)
        # caching every column costs N * 2^N bytes; skip it for big registers
        if N <= 20:
            cache[b] = z
        return z

    energies = np.full(1 << N, model.offset)
    for b in range(N):
        if model.h[b] != 0.0:
            energies += model.h[b] * spin(b)
    for (i, j), v in model.J.items():
        energies += v * (spin(i) * spin(j))
    return EnergyTable(energies, N)


def initial_state(n_qubits: int) -> Statevector:
    if n_qubits < 1:
        raise InstanceError("need at least one qubit")
    dim = 1 << n_qubits
    return Statevector(np.full(dim, 1.0 / np.sqrt(dim), dtype=complex), n_qubits)


def _mixer_blocks(n_qubits: int) -> list[int]:
    full, rest = divmod(n_qubits, _MIXER_BLOCK)
    return [_MIXER_BLOCK] * full + ([rest] if rest else [])


def _apply_mixer(psi: np.ndarray, beta: float, blocks: list[int]) -> np.ndarray:
    c, s = np.cos(beta), -1j * np.sin(beta)
    rx = np.array([[c, s], [s, c]])
    kron_cache = {}
    dim = psi.size
    pre = 1
    for k in blocks:
        if k not in kron_cache:
            kron_cache[k] = reduce(np.kron, [rx] * k)
        M = kron_cache[k]
        d = 1 << k
        post = dim // (pre * d)
        if post == 1:
            psi = psi.reshape(pre, d) @ M.T
        else:
            psi = M @ psi.reshape(pre, d, post)
        pre *= d
        psi = psi.reshape(-1)
    return psi


def evolve(model, params: QaoaParams) -> Statevector:
    """Run ``p`` alternating cost-phase and mixer layers from ``|+>^n``.

    ``model`` may be an :class:`IsingModel` or an already computed
    :class:`EnergyTable` (preferred inside optimisation loops).
    """
    table = model if isinstance(model, EnergyTable) else precompute_energies(model)
    N = table.n_qubits
    psi = initial_state(N).amplitudes.copy()
    blocks = _mixer_blocks(N)
    for gamma, beta in zip(params.gammas, params.betas):
        if gamma != 0.0:
            psi *= np.exp(-1j * gamma * table.energies)
        if beta != 0.0:
            psi = _apply_mixer(psi, beta, blocks)
    return Statevector(psi, N)


def expectation(state: Statevector, table: EnergyTable) -> float:
    if state.n_qubits != table.n_qubits:
        raise InstanceError(
            f"state has {state.n_qubits} qubits, energy table {table.n_qubits}"
        )
    return float(state.probabilities() @ table.energies)


def exact_distribution(state: Statevector, cutoff: float = 1e-300) -> OutcomeDistribution:
    probs = state.probabilities()
    states = np.flatnonzero(probs >= cutoff)
    return OutcomeDistribution(states, probs[states], state.n_qubits)


def draw_outcomes(probs: np.ndarray, shots: int, rng: np.random.Generator):
    """Yield chunks of inverse-CDF draws; the stream for ``S`` shots is a
    prefix of the stream for any larger count under the same generator."""
    cdf = np.cumsum(probs)
    total = cdf[-1]
    done = 0
    while done < shots:
        size = min(_SAMPLE_CHUNK, shots - done)
        u = rng.random(size) * total
        yield np.searchsorted(cdf, u, side="right")
        done += size


def sample(state: Statevector, shots: int, seed=None) -> OutcomeDistribution:
    shots = check_shots(shots)
    rng = np.random.default_rng(seed)
    counts = np.zeros(1 << state.n_qubits, dtype=np.int64)
    for idx in draw_outcomes(state.probabilities(), shots, rng):
        counts += np.bincount(idx, minlength=counts.size)
    states = np.flatnonzero(counts)
    c = counts[states]
    return OutcomeDistribution(states, c / shots, state.n_qubits, shots=shots, seed=seed, counts=c)
