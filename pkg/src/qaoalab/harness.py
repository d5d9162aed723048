"""End-to-end solves, the brute-force oracle and shot-budget experiments."""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._validation import InstanceError
from .bits import bits_to_int, bits_to_str
from .estimator import QAOASolver
from .lar import Assignment, LarInstance, brute_force_optimum, load_instance, reference_instance
from .postproc import PostprocConfig, SolveReport
from .qubo import brute_force_qubo, encode_assignment, encode_qubo

log = logging.getLogger(__name__)

CSV_HEADER = [
    "shots",
    "trials",
    "mean_objective",
    "std_objective",
    "optimal_rate",
    "mean_states_evaluated",
    "mean_coverage",
    "mean_time_s",
]
LONG_HEADER = ["shots", "trial", "seed", "objective", "feasible", "states_evaluated", "coverage", "time_s"]
DEFAULT_SHOT_LADDER = [10_000, 25_000, 50_000, 100_000, 150_000, 200_000, 250_000]
OPTIMUM_ATOL = 1e-9


def parse_shots(text) -> int | str:
    if isinstance(text, (int, np.integer)) and not isinstance(text, bool):
        shots = int(text)
    elif str(text).strip().lower() in ("exact", "inf", "infinity"):
        return "exact"
    else:
        try:
            shots = int(str(text).replace("_", ""))
        except ValueError as exc:
            raise InstanceError(f"shots must be a positive integer or 'exact', got {text!r}") from exc
    if shots < 1:
        raise InstanceError(f"shots must be >= 1, got {shots}")
    return shots


def _shots_key(shots):
    return (1, 0) if shots == "exact" else (0, shots)


def resolve_instance(instance) -> LarInstance:
    if instance is None:
        return reference_instance()
    if isinstance(instance, LarInstance):
        return instance
    return load_instance(instance)


@dataclass
class SolveConfig:
    instance: object = None
    p: int = 5
    max_evals: int = 1000
    shots: int | str = "exact"
    seed: int = 0
    postproc: PostprocConfig = field(default_factory=PostprocConfig)
    penalty: float | None = None


@dataclass
class ExperimentConfig:
    instance: object = None
    p: int = 5
    max_evals: int = 1000
    shots_levels: list = field(default_factory=lambda: list(DEFAULT_SHOT_LADDER) + ["exact"])
    trials: int = 30
    seed: int = 0
    postproc: PostprocConfig = field(default_factory=PostprocConfig)
    penalty: float | None = None
    record_time: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise InstanceError("trials must be >= 1")
        if not self.shots_levels:
            raise InstanceError("need at least one shots level")
        self.shots_levels = sorted({parse_shots(s) for s in self.shots_levels}, key=_shots_key)


@dataclass
class TrialRecord:
    shots: int | str
    trial: int
    seed: int
    objective: float = math.nan
    feasible: bool = False
    states_evaluated: int = 0
    coverage: float = 0.0
    time_s: float = 0.0
    error: str | None = None


@dataclass
class LevelRow:
    shots: int | str
    trials: int
    mean_objective: float
    std_objective: float
    optimal_rate: float
    mean_states_evaluated: float
    mean_coverage: float
    mean_time_s: float
    failed: int = 0


@dataclass
class ExperimentReport:
    rows: list
    records: list
    oracle_optimum: float | None

    def row(self, shots) -> LevelRow:
        shots = parse_shots(shots)
        for r in self.rows:
            if r.shots == shots:
                return r
        raise KeyError(shots)

    def to_csv(self, record_time: bool = False) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.rows:
            writer.writerow(
                [
                    r.shots,
                    r.trials,
                    _fmt(r.mean_objective),
                    _fmt(r.std_objective),
                    _fmt(r.optimal_rate),
                    _fmt(r.mean_states_evaluated),
                    _fmt(r.mean_coverage),
                    # wall clock is not reproducible; left blank unless asked for
                    _fmt(r.mean_time_s) if record_time else "",
                ]
            )
        return buf.getvalue()

    def to_long_csv(self, record_time: bool = False) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(LONG_HEADER)
        for t in self.records:
            writer.writerow(
                [
                    t.shots,
                    t.trial,
                    t.seed,
                    _fmt(t.objective),
                    int(t.feasible),
                    t.states_evaluated,
                    _fmt(t.coverage),
                    _fmt(t.time_s) if record_time else "",
                ]
            )
        return buf.getvalue()


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return format(float(x), ".10g")


def _fit(instance: LarInstance, p, max_evals, seed, penalty):
    q = encode_qubo(instance.graph, instance.policy, penalty)
    return QAOASolver(p=p, max_evals=max_evals, random_state=seed).fit(q)


def run_solve(config: SolveConfig) -> SolveReport:
    """Encode, optimise the angles, sample and post-process one instance.

    The optimiser trace is attached to the report as ``report.trace``.
    """
    instance = resolve_instance(config.instance)
    start = time.perf_counter()
    solver = _fit(instance, config.p, config.max_evals, config.seed, config.penalty)
    report = solver.solve(config.shots, config.postproc)
    report.trace = solver.trace_
    report.state = solver.state_
    report.time_s = time.perf_counter() - start
    return report


@dataclass
class OracleResult:
    assignment: Assignment
    cost: float
    state: int
    bits: str
    qubo_state: int | None
    qubo_value: float | None

    @property
    def agrees(self) -> bool | None:
        if self.qubo_state is None:
            return None
        return self.qubo_state == self.state and abs(self.qubo_value - self.cost) <= OPTIMUM_ATOL


def run_oracle(instance=None, penalty: float | None = None, max_qubo_vars: int = 22) -> OracleResult:
    """Brute-force optimum, cross-checked by exhaustive QUBO minimisation when small enough."""
    instance = resolve_instance(instance)
    assignment, cost = brute_force_optimum(instance.graph, instance.policy)
    x = encode_assignment(assignment, instance.n_layers)
    state = bits_to_int(x)
    q = encode_qubo(instance.graph, instance.policy, penalty)
    qubo_state = qubo_value = None
    if q.n_vars <= max_qubo_vars:
        qubo_state, qubo_value = brute_force_qubo(q, max_vars=max_qubo_vars)
    return OracleResult(assignment, cost, state, bits_to_str(x), qubo_state, qubo_value)


def _aggregate(shots, records, optimum) -> LevelRow:
    ok = [r for r in records if r.error is None]
    if not ok:
        nan = math.nan
        return LevelRow(shots, 0, nan, nan, nan, nan, nan, nan, failed=len(records))
    obj = np.array([r.objective for r in ok])
    rate = math.nan if optimum is None else float(np.mean(np.abs(obj - optimum) <= OPTIMUM_ATOL))
    return LevelRow(
        shots=shots,
        trials=len(ok),
        mean_objective=float(obj.mean()),
        std_objective=float(obj.std()),
        optimal_rate=rate,
        mean_states_evaluated=float(np.mean([r.states_evaluated for r in ok])),
        mean_coverage=float(np.mean([r.coverage for r in ok])),
        mean_time_s=float(np.mean([r.time_s for r in ok])),
        failed=len(records) - len(ok),
    )


def run_experiment(config: ExperimentConfig, oracle: OracleResult | None = None) -> ExperimentReport:
    """Repeat solves across shot budgets; trial ``t`` uses seed ``config.seed + t``.

    The angle optimisation does not depend on the shot budget, so each
    trial is fitted once and its final state is reused for every level.
    """
    instance = resolve_instance(config.instance)
    if oracle is None:
        try:
            oracle = run_oracle(instance, config.penalty)
        except Exception as exc:  # oracle is optional for large instances
            log.warning("oracle unavailable: %s", exc)
    optimum = None if oracle is None else oracle.cost

    fitted = {}
    records = []
    for trial in range(config.trials):
        seed = config.seed + trial
        start = time.perf_counter()
        try:
            fitted[trial] = _fit(instance, config.p, config.max_evals, seed, config.penalty)
        except Exception as exc:
            log.warning("trial %d failed during fit: %s", trial, exc)
            fitted[trial] = exc
        fit_time = time.perf_counter() - start
        for shots in config.shots_levels:
            rec = TrialRecord(shots, trial, seed)
            solver = fitted[trial]
            if isinstance(solver, Exception):
                rec.error = str(solver)
                records.append(rec)
                continue
            start = time.perf_counter()
            try:
                report = solver.solve(shots, config.postproc)
            except Exception as exc:
                log.warning("trial %d at %s shots failed: %s", trial, shots, exc)
                rec.error = str(exc)
            else:
                rec.objective = report.objective
                rec.feasible = report.feasible
                rec.states_evaluated = report.states_evaluated
                rec.coverage = report.coverage
            rec.time_s = fit_time + time.perf_counter() - start
            records.append(rec)
        log.info("trial %d/%d done", trial + 1, config.trials)

    rows = [
        _aggregate(shots, [r for r in records if r.shots == shots], optimum)
        for shots in config.shots_levels
    ]
    records.sort(key=lambda r: (_shots_key(r.shots), r.trial))
    return ExperimentReport(rows, records, optimum)


def write_text(path, text: str) -> None:
    Path(path).write_text(text)

