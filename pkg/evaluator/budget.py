"""
Evaluation Inputs and Results

Assignments of algebra elements to free variables, optimizer budgets, and the
result record returned by the evaluator.
"""
from dataclasses import dataclass, field, replace, asdict
from typing import Dict, Tuple

import numpy as np

import config
from errors import ValidationError
from algebra.tracial import AlgElement, is_unitary, operator_norm
from algebra.specs import matrix_to_pairs, pairs_to_matrix
from formulas.syntax import Sort


class Assignment:
    """
    Free-variable assignment, checked against each variable's sort.

    Unitary variables must map to unitaries, Ball variables to elements of
    operator norm at most 1, all within the algebra.
    """

    def __init__(self, algebra, values=None, unitary=()):
        """
        Args:
            algebra: TracialAlgebra the values live in
            values: Mapping of variable name to matrix or AlgElement
            unitary: Names whose sort is Unitary; the others are Ball
        """
        self.algebra = algebra
        self.sorts = {}
        self.values = {}
        unitary = set(unitary)
        for name, value in (values or {}).items():
            m = value.matrix if isinstance(value, AlgElement) else np.asarray(value, dtype=complex)
            if m.shape != (algebra.ambient, algebra.ambient) or not algebra.contains(m):
                raise ValidationError(f"Value of {name!r} is not an element of {algebra.name}")
            sort = Sort.UNITARY if name in unitary else Sort.BALL
            if sort is Sort.UNITARY and not is_unitary(m):
                raise ValidationError(f"Value of {name!r} is not unitary")
            if sort is Sort.BALL and operator_norm(m) > 1 + config.BALL_TOL:
                raise ValidationError(f"Value of {name!r} lies outside the unit ball")
            self.sorts[name] = sort
            self.values[name] = m
        missing = unitary - set(self.values)
        if missing:
            raise ValidationError(f"Unitary names without values: {sorted(missing)}")

    def __contains__(self, name):
        return name in self.values

    def __getitem__(self, name):
        return self.values[name]

    def names(self):
        return set(self.values)

    def as_env(self):
        return dict(self.values)

    def to_dict(self):
        return {
            name: {'sort': self.sorts[name].value, 'matrix': matrix_to_pairs(m)}
            for name, m in sorted(self.values.items())
        }

    @classmethod
    def from_dict(cls, algebra, data):
        """Inverse of to_dict; also accepts bare matrices (Ball sort)."""
        values, unitary = {}, []
        for name, entry in data.items():
            if isinstance(entry, dict):
                values[name] = pairs_to_matrix(entry.get('matrix'))
                if entry.get('sort') == Sort.UNITARY.value:
                    unitary.append(name)
            else:
                values[name] = pairs_to_matrix(entry)
        return cls(algebra, values, unitary)


@dataclass(frozen=True)
class EvalBudget:
    """
    Optimizer budget.

    Attributes:
        restarts: Restarts of each outermost quantifier block
        iterations: Objective evaluations per restart of an outermost block
        nested_restarts: Restarts of each nested block
        nested_iterations: Objective evaluations per restart of a nested block
        seed: Root seed
        tolerance: Early-exit tolerance against the a-priori bound
        initial_step: First step length of the projected search
        workers: Threads for outermost-block restarts
    """

    restarts: int = config.EVAL_RESTARTS
    iterations: int = config.EVAL_ITERATIONS
    nested_restarts: int = config.EVAL_NESTED_RESTARTS
    nested_iterations: int = config.EVAL_NESTED_ITERATIONS
    seed: int = config.EVAL_SEED
    tolerance: float = config.EVAL_TOLERANCE
    initial_step: float = config.EVAL_INITIAL_STEP
    workers: int = config.EVAL_WORKERS

    def __post_init__(self):
        for name in ('restarts', 'iterations', 'nested_restarts', 'nested_iterations', 'workers'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
                raise ValidationError(f"Budget {name} must be a positive integer, got {value!r}")
        if not self.tolerance > 0 or not self.initial_step > 0:
            raise ValidationError("Budget tolerance and initial step must be positive")
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ValidationError(f"Seed must be a nonnegative integer, got {self.seed!r}")

    def for_depth(self, depth):
        """(restarts, iterations) of a block at the given nesting depth."""
        if depth == 0:
            return self.restarts, self.iterations
        return self.nested_restarts, self.nested_iterations

    def doubled(self):
        return replace(self, restarts=2 * self.restarts)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class BlockWitness:
    """Optimum of one quantifier block along the principal variation."""

    kind: str
    depth: int
    value: float
    values: Dict[str, np.ndarray] = field(repr=False)
    sorts: Dict[str, str] = field(default_factory=dict)
    restart_values: Tuple[float, ...] = ()

    def to_dict(self):
        return {
            'kind': self.kind,
            'depth': self.depth,
            'value': self.value,
            'variables': {
                name: {'sort': self.sorts.get(name), 'matrix': matrix_to_pairs(m)}
                for name, m in self.values.items()
            },
        }


@dataclass(frozen=True)
class EvalResult:
    """
    Value of a formula with optimizer diagnostics.

    Attributes:
        value: Formula value (an upper bound for Inf-rooted, lower for Sup-rooted)
        witnesses: BlockWitness per quantifier block, outermost first
        gap_estimate: Spread of the top three restart optima, heuristic
        budget_used: Objective evaluations performed
        seed: Root seed
        budget: EvalBudget used
    """

    value: float
    witnesses: Tuple[BlockWitness, ...]
    gap_estimate: float
    budget_used: int
    seed: int
    budget: EvalBudget

    def to_dict(self):
        return {
            'value': self.value,
            'witnesses': [w.to_dict() for w in self.witnesses],
            'gap_estimate': self.gap_estimate,
            'budget_used': self.budget_used,
            'seed': self.seed,
            'budget': self.budget.to_dict(),
        }
