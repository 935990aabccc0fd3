"""
Heuristic Formula Evaluator

Each block of like quantifiers is a joint search over the real
parametrization of its variables: Ball variables through 2n coordinates
clipped to the unit ball, Unitary variables as exp(i h) for self-adjoint h.
A restart runs projected descent (ascent for sup blocks) with a backtracking
step, then a Nelder-Mead polish in low dimension. Variables under a
commutation penalty are also searched inside the exact commutant of their
partners, on every other restart.

Nested blocks run inside the objective of the enclosing one. With a single
block, values are attained at the reported witnesses, so Inf-rooted values
are upper bounds and Sup-rooted values lower bounds.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy import optimize

import config
from errors import ValidationError, NumericalError
from formulas.syntax import QuantKind, Sort, free_variables
from formulas.modulus import value_bound
from algebra.tracial import commutant
from .budget import Assignment, EvalBudget, EvalResult, BlockWitness
from .compiler import FormulaCompiler, SearchSpace
from .constraints import penalty_partners, block_constraints

logger = logging.getLogger(__name__)


class _Stop(Exception):
    """Raised inside an objective to end a local search."""


class _Objective:
    """
    Signed objective (minimized) tracking the best point seen.

    Stops the search when its evaluation budget is spent or the target value
    is reached.
    """

    def __init__(self, evaluate, kind, target, maxfev, counter):
        self.evaluate = evaluate
        self.sign = -1.0 if kind is QuantKind.SUP else 1.0
        self.target = target
        self.maxfev = maxfev
        self.counter = counter
        self.calls = 0
        self.best_value = None
        self.best_params = None

    @property
    def remaining(self):
        return self.maxfev - self.calls

    def reached(self, value):
        if self.sign < 0:
            return value >= self.target
        return value <= self.target

    def __call__(self, params):
        if self.calls >= self.maxfev:
            raise _Stop
        value = self.evaluate(params)
        self.calls += 1
        self.counter.tick()
        if not math.isfinite(value):
            raise NumericalError(f"Objective returned {value!r}")
        if self.best_value is None or self.sign * value < self.sign * self.best_value:
            self.best_value = value
            self.best_params = np.array(params, dtype=float)
        if self.reached(value):
            raise _Stop
        return self.sign * value


class OptimizingCompiler(FormulaCompiler):
    """Compiler whose quantifier blocks run restarted projected searches."""

    def __init__(self, algebra, budget, partners=None):
        """
        Args:
            algebra: TracialAlgebra
            budget: EvalBudget
            partners: Commutation partners from penalty_partners, optional
        """
        super().__init__(algebra)
        self.budget = budget
        self.partners = partners or {}
        self._commutants = {}

    # -- search spaces -----------------------------------------------------

    def _commutant(self, mats):
        key = tuple(m.tobytes() for m in mats)
        sub = self._commutants.get(key)
        if sub is None:
            if len(self._commutants) >= config.SUBSPACE_CACHE_SIZE:
                self._commutants.clear()
            sub = self._commutants[key] = commutant(self.algebra, mats, validate=False)
        return sub

    def narrowed_space(self, variables, constraints, env):
        """
        SearchSpace with each constrained variable inside its exact commutant.

        Returns:
            SearchSpace, or None when no commutant is smaller than the algebra
        """
        entries, narrowed = [], False
        for var, sort in variables:
            algebra = self.algebra
            constraint = constraints.get(var)
            if constraint is not None:
                mats = [env[w] for w in sorted(constraint.outer) if w in env]
                for _, theirs in constraint.inner:
                    ranged = [env[w] for w in sorted(theirs) if w in env]
                    if ranged:
                        mats.extend(self._commutant(ranged).basis)
                if mats:
                    sub = self._commutant(mats)
                    if sub.dimension < algebra.dimension:
                        algebra, narrowed = sub, True
            entries.append((var, sort, algebra))
        return SearchSpace(entries) if narrowed else None

    # -- starting points ---------------------------------------------------

    def _start(self, space, restart, rng):
        """
        Starting point of one restart.

        Restart 0 starts at 0 for Ball and 1 for Unitary variables. The next
        config.STRUCTURED_STARTS restarts start at reference unitaries of each
        variable's algebra, spread so that variables of a block differ. Other
        restarts start at projections of random elements.
        """
        x0 = np.zeros(space.size)
        if restart == 0:
            return x0
        for j, (var, sort, algebra, start, stop) in enumerate(space.entries):
            references = algebra.reference_unitaries
            if references and restart <= config.STRUCTURED_STARTS:
                u = references[(restart - 1 + j * restart) % len(references)]
                x0[start:stop] = space.encode(var, u)
            elif sort is Sort.UNITARY:
                x0[start:stop] = rng.uniform(-np.pi, np.pi, stop - start)
            else:
                x = self.algebra.random_element(rng)
                x0[start:stop] = algebra.real_coordinates(algebra.project(x))
        return x0

    def _rngs(self, depth, block_id, restarts):
        # Nested blocks reuse the same streams at every call, so a block's
        # value is a deterministic function of the enclosing assignment.
        if depth == 0:
            seq = np.random.SeedSequence(self.budget.seed)
        else:
            seq = np.random.SeedSequence([self.budget.seed, depth, block_id])
        return [np.random.default_rng(child) for child in seq.spawn(restarts)]

    # -- local search ------------------------------------------------------

    def _gradient(self, objective, x, rng, full):
        """Central-difference gradient, or its component along one random direction."""
        h = config.EVAL_FD_STEP
        if full:
            g = np.zeros(x.size)
            for i in range(x.size):
                e = np.zeros(x.size)
                e[i] = h
                g[i] = (objective(x + e) - objective(x - e)) / (2 * h)
            return g
        d = rng.standard_normal(x.size)
        d /= np.linalg.norm(d)
        return (objective(x + h * d) - objective(x - h * d)) / (2 * h) * d

    def _descend(self, objective, space, x0, rng):
        """
        Projected descent with a backtracking step.

        Returns:
            True when the step shrank below config.EVAL_MIN_STEP, False when
            the search stopped at a vanishing gradient
        """
        x = space.project(x0)
        fx = objective(x)
        full = 2 * x.size + 1 <= objective.remaining // 2
        step = self.budget.initial_step
        failures = 0
        while True:
            g = self._gradient(objective, x, rng, full)
            norm = np.linalg.norm(g)
            if norm == 0.0:
                if full:
                    return False
                failures += 1
                if failures > config.EVAL_DIRECTION_TRIES:
                    return False
                continue
            direction = g / norm
            moved = False
            while step >= config.EVAL_MIN_STEP:
                trial = space.project(x - step * direction)
                ft = objective(trial)
                if ft < fx:
                    x, fx, moved = trial, ft, True
                    step *= 2
                    break
                step /= 2
            if moved:
                failures = 0
                continue
            if full:
                return True
            failures += 1
            if failures > config.EVAL_DIRECTION_TRIES:
                return True
            step = self.budget.initial_step / 2 ** failures

    def _search(self, objective, space, x0, rng):
        try:
            converged = self._descend(objective, space, x0, rng)
            if converged and space.size <= config.NELDER_MEAD_MAX_DIM and objective.remaining > 0:
                best = objective.best_params
                edge = config.EVAL_POLISH_STEP
                simplex = np.vstack([best, best + edge * np.eye(space.size)])
                optimize.minimize(objective, best, method='Nelder-Mead', options={
                    'maxfev': objective.remaining, 'initial_simplex': simplex,
                    'xatol': 1e-10, 'fatol': 1e-12, 'adaptive': space.size > 4,
                })
        except _Stop:
            pass
        return objective.best_value, objective.best_params

    def quantify(self, kind, variables, body, body_fn, depth, block_id):
        full_space = self.search_space(variables)
        constraints = block_constraints(variables, body, self.partners)
        sorts = {var: sort.value for var, sort in variables}
        # Values are nonnegative, so an inf block at 0 and a sup block at the
        # a-priori bound cannot improve.
        if kind is QuantKind.INF:
            target = self.budget.tolerance
        else:
            target = value_bound(body) - self.budget.tolerance
        parallel = depth == 0 and self.budget.workers > 1

        def done(value):
            return value <= target if kind is QuantKind.INF else value >= target

        def run(env, cache, trace):
            restarts, iterations = self.budget.for_depth(depth)
            rngs = self._rngs(depth, block_id, restarts)
            narrowed = None
            if constraints and restarts > 1:
                narrowed = self.narrowed_space(variables, constraints, env)

            def restart(index):
                # odd restarts search the commutants when there are any
                space = narrowed if narrowed is not None and index % 2 == 1 else full_space

                def evaluate(params):
                    inner = dict(env)
                    inner.update(space.decode(params))
                    return body_fn(inner, {}, None)

                objective = _Objective(evaluate, kind, target, iterations, self.counter)
                rng = rngs[index]
                value, params = self._search(objective, space, self._start(space, index, rng), rng)
                return value, space.decode(params)

            if parallel:
                with ThreadPoolExecutor(max_workers=self.budget.workers) as pool:
                    results = list(pool.map(restart, range(restarts)))
                # Same outcome as the sequential loop below
                for index, (value, _) in enumerate(results):
                    if done(value):
                        results = results[:index + 1]
                        break
            else:
                results = []
                for index in range(restarts):
                    results.append(restart(index))
                    if done(results[-1][0]):
                        break

            pick = min if kind is QuantKind.INF else max
            best_value, values = pick(results, key=lambda r: r[0])
            if trace is not None:
                trace.append(BlockWitness(
                    kind=kind.value,
                    depth=depth,
                    value=float(best_value),
                    values=values,
                    sorts=sorts,
                    restart_values=tuple(float(v) for v, _ in results),
                ))
                inner = dict(env)
                inner.update(values)
                body_fn(inner, {}, trace)
            return best_value

        return run


def _gap_estimate(witnesses):
    """Spread of the best three restart optima of the outermost blocks."""
    gap = 0.0
    for w in witnesses:
        if w.depth != 0 or len(w.restart_values) < 2:
            continue
        ordered = sorted(w.restart_values, reverse=(w.kind == QuantKind.SUP.value))[:3]
        gap = max(gap, abs(ordered[-1] - ordered[0]))
    return gap


def evaluate(formula, algebra, assignment=None, budget=None):
    """
    Evaluate a formula in a tracial algebra.

    Args:
        formula: Formula tree
        algebra: TracialAlgebra
        assignment: Assignment (or dict of Ball values) for the free variables
        budget: EvalBudget, defaults from config

    Returns:
        EvalResult; identical inputs give identical results

    Raises:
        ValidationError: a free variable has no value
        NumericalError: the objective produced a non-finite value
    """
    budget = budget or EvalBudget()
    if assignment is None:
        assignment = Assignment(algebra)
    elif not isinstance(assignment, Assignment):
        assignment = Assignment(algebra, assignment)
    if assignment.algebra is not algebra:
        raise ValidationError("Assignment belongs to a different algebra")
    missing = free_variables(formula) - assignment.names()
    if missing:
        raise ValidationError(f"Missing assignment for free variables {sorted(missing)}")

    compiler = OptimizingCompiler(algebra, budget, penalty_partners(formula))
    fn = compiler.compile(formula)
    trace = []
    value = float(fn(assignment.as_env(), {}, trace))
    result = EvalResult(
        value=value,
        witnesses=tuple(trace),
        gap_estimate=_gap_estimate(trace),
        budget_used=compiler.counter.count,
        seed=budget.seed,
        budget=budget,
    )
    logger.info("Evaluated on %s: value=%.6g, %d objective evaluations",
                algebra.name, value, result.budget_used)
    return result
