"""
Exhaustive Grid Oracle

Evaluates formulas on tiny algebras by exhaustive search over a grid of each
quantified variable's real coordinates. Ball variables range over [-1, 1]^2n
then are clipped into the unit ball; Unitary variables are exp(i h) with the
coordinates of h in [-pi, pi]^n. The grid value is within the reported error
bound of the exact value, a sum of continuity moduli at the covering radius.
"""
import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

import config
from errors import ValidationError
from formulas.syntax import QuantKind, Sort, Sup, Inf, children, free_variables
from formulas.modulus import occurrence_modulus
from .budget import Assignment
from .compiler import FormulaCompiler, quantifier_block

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OracleResult:
    """
    Grid value with its certified error bound.

    Attributes:
        value: Value computed on the grid
        error_bound: |value - exact value| <= error_bound
        evaluations: Objective evaluations performed
        grid_points: Points per real axis
    """

    value: float
    error_bound: float
    evaluations: int
    grid_points: int

    @property
    def lower(self):
        return max(self.value - self.error_bound, 0.0)

    @property
    def upper(self):
        return self.value + self.error_bound

    def to_dict(self):
        return {
            'value': self.value,
            'error_bound': self.error_bound,
            'evaluations': self.evaluations,
            'grid_points': self.grid_points,
        }


def _clip_batch(xs):
    u, s, vh = np.linalg.svd(xs)
    return (u * np.minimum(s, 1.0)[:, None, :]) @ vh


def _exp_i_batch(hs):
    w, v = np.linalg.eigh(hs)
    return (v * np.exp(1j * w)[:, None, :]) @ np.conj(np.transpose(v, (0, 2, 1)))


def _axis(sort, points):
    if sort is Sort.UNITARY:
        return np.linspace(-np.pi, np.pi, points)
    return np.linspace(-1.0, 1.0, points)


def covering_radius(sort, dimension, points):
    """Largest ||.||_2 distance from a point of the variable's range to the grid."""
    width = _real_width(sort, dimension)
    span = 2 * math.pi if sort is Sort.UNITARY else 2.0
    return span / (points - 1) / 2 * math.sqrt(width)


class GridCompiler(FormulaCompiler):
    """Compiler whose quantifier blocks are exhaustive grid searches."""

    def __init__(self, algebra, points):
        super().__init__(algebra)
        self.points = points
        self._grids = {}

    def grid(self, sort):
        """(P, D, D) stack of the grid elements for a sort."""
        if sort not in self._grids:
            h = self.algebra.self_adjoint_basis
            n = self.algebra.dimension
            width = n if sort is Sort.UNITARY else 2 * n
            axis = _axis(sort, self.points)
            coords = np.array(list(itertools.product(axis, repeat=width)))
            if sort is Sort.UNITARY:
                mats = _exp_i_batch(np.tensordot(coords, h, axes=1))
            else:
                mats = _clip_batch(np.tensordot(coords[:, :n] + 1j * coords[:, n:], h, axes=1))
            self._grids[sort] = mats
        return self._grids[sort]

    def quantify(self, kind, variables, body, body_fn, depth, block_id):
        pick = max if kind is QuantKind.SUP else min

        def run(env, cache, trace):
            grids = [(var, self.grid(sort)) for var, sort in variables]
            best = None
            for combo in itertools.product(*(range(len(g)) for _, g in grids)):
                inner = dict(env)
                for (var, g), i in zip(grids, combo):
                    inner[var] = g[i]
                value = body_fn(inner, {}, None)
                self.counter.tick()
                best = value if best is None else pick(best, value)
            return best

        return run


def _real_width(sort, dimension):
    return dimension if sort is Sort.UNITARY else 2 * dimension


def _quantifier_nodes(formula):
    stack, nodes = [formula], []
    while stack:
        node = stack.pop()
        if isinstance(node, (Sup, Inf)):
            nodes.append(node)
        stack.extend(children(node))
    return nodes


def _cost(formula, points, dimension):
    """Objective evaluations an exhaustive search performs."""
    if isinstance(formula, (Sup, Inf)):
        _, variables, body = quantifier_block(formula)
        count = 1
        for _, sort in variables:
            count *= points ** _real_width(sort, dimension)
        return count * (1 + _cost(body, points, dimension))
    return sum(_cost(c, points, dimension) for c in children(formula))


def error_bound(formula, algebra, points):
    """Sum over quantifiers of the body's modulus in the bound variable at the covering radius."""
    total = 0.0
    for node in _quantifier_nodes(formula):
        radius = covering_radius(node.sort, algebra.dimension, points)
        total += occurrence_modulus(node.body, node.var)(radius)
    return total


def oracle_eligible(formula, algebra):
    """Abelian algebras of dimension <= 3, or total quantified real dimension <= 6."""
    if algebra.is_abelian() and algebra.dimension <= config.ORACLE_MAX_ABELIAN_DIM:
        return True
    total = sum(_real_width(q.sort, algebra.dimension) for q in _quantifier_nodes(formula))
    return total <= config.ORACLE_MAX_REAL_DIM


def evaluate_oracle(formula, algebra, assignment=None, grid=None):
    """
    Evaluate a formula by exhaustive grid search.

    Args:
        formula: Formula tree
        algebra: A tiny TracialAlgebra
        assignment: Assignment (or dict of Ball values) for the free variables
        grid: Points per real axis, default config.ORACLE_GRID_POINTS

    Returns:
        OracleResult

    Raises:
        ValidationError: formula or algebra too large for exhaustive search,
            or the grid needs more than config.ORACLE_MAX_POINTS evaluations
    """
    points = config.ORACLE_GRID_POINTS if grid is None else int(grid)
    if points < 2:
        raise ValidationError(f"Oracle grid needs at least 2 points per axis, got {points}")
    if assignment is None:
        assignment = Assignment(algebra)
    elif not isinstance(assignment, Assignment):
        assignment = Assignment(algebra, assignment)
    missing = free_variables(formula) - assignment.names()
    if missing:
        raise ValidationError(f"Missing assignment for free variables {sorted(missing)}")
    if not oracle_eligible(formula, algebra):
        raise ValidationError(f"{algebra.name} is too large for exhaustive search")
    cost = _cost(formula, points, algebra.dimension)
    if cost > config.ORACLE_MAX_POINTS:
        raise ValidationError(f"Exhaustive grid search needs {cost} evaluations, above {config.ORACLE_MAX_POINTS}")

    compiler = GridCompiler(algebra, points)
    value = float(compiler.compile(formula)(assignment.as_env(), {}, None))
    result = OracleResult(
        value=value,
        error_bound=error_bound(formula, algebra, points),
        evaluations=compiler.counter.count,
        grid_points=points,
    )
    logger.info("Oracle on %s: value=%.6g +- %.3g over %d evaluations",
                algebra.name, value, result.error_bound, result.evaluations)
    return result
