"""
Evaluator Module

Heuristic evaluation of formulas in tracial algebras, the exhaustive grid
oracle for tiny algebras, and the direct power vs wreath product experiment.
"""

from .budget import Assignment, EvalBudget, EvalResult, BlockWitness
from .optimizer import evaluate
from .oracle import OracleResult, evaluate_oracle, oracle_eligible
from .experiment import run_t0_t1_experiment, best_permutation_unitary
from .history import ExperimentHistory, format_duration

__all__ = [
    'Assignment', 'EvalBudget', 'EvalResult', 'BlockWitness', 'evaluate',
    'OracleResult', 'evaluate_oracle', 'oracle_eligible', 'run_t0_t1_experiment',
    'best_permutation_unitary', 'ExperimentHistory', 'format_duration',
]
