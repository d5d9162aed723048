"""QAOA on layered-architecture QUBOs with explicit sampling budgets."""

from .estimator import QAOASolver
from .harness import ExperimentConfig, SolveConfig, run_experiment, run_oracle, run_solve
from .ising import IsingModel, ising_energy, to_ising
from .lar import (
    Assignment,
    DependencyGraph,
    LarInstance,
    LayerPolicy,
    assignment_cost,
    brute_force_optimum,
    cost_breakdown,
    load_instance,
    reference_instance,
)
from .postproc import PostprocConfig, SolveReport
from .qubo import QuboProblem, decode_bits, encode_qubo, qubo_value

__version__ = "0.1.0"
