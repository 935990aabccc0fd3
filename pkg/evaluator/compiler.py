"""
Formula Compiler

Turns a formula tree into nested closures over an environment of matrices.
Subclasses decide how a block of like quantifiers is evaluated.
"""
import math
import threading

import numpy as np

from errors import ValidationError
from algebra.tracial import clip_to_ball
from formulas.syntax import (
    Var, One, Zero, Add, Mul, Adjoint, ScaleTerm, Norm2, Dist2, Const, Max, Min,
    Plus, DotMinus, Sqrt, Square, Scale, ApplyModulus, Sup, Inf, Sort,
)


class EvaluationCounter:
    """Thread-safe count of objective evaluations."""

    def __init__(self):
        self.count = 0
        self._lock = threading.Lock()

    def tick(self, n=1):
        with self._lock:
            self.count += n


def quantifier_block(formula):
    """
    Leading run of like quantifiers.

    Returns:
        (kind, [(var, sort), ...], body); the run stops at a repeated name
    """
    kind = formula.kind
    variables = []
    node = formula
    while isinstance(node, (Sup, Inf)) and node.kind is kind:
        if any(node.var == v for v, _ in variables):
            break
        variables.append((node.var, node.sort))
        node = node.body
    return kind, variables, node


class FormulaCompiler:
    """
    Compiles formulas for one algebra.

    Compiled formulas are callables fn(env, cache, trace) -> float, with env a
    dict of variable matrices and cache a per-environment memo of term values.
    """

    def __init__(self, algebra):
        self.algebra = algebra
        self.counter = EvaluationCounter()
        self._identity = algebra.identity
        self._zero = np.zeros_like(self._identity)
        rho = algebra.rho
        scalar = rho[0, 0].real
        self._scalar_rho = math.sqrt(scalar) if np.allclose(rho, scalar * self._identity) else None
        self._rho_sqrt = algebra.rho_sqrt
        self._slots = {}
        self._blocks = 0

    # -- terms -------------------------------------------------------------

    def term(self, term):
        """Compiled term fn(env, cache) -> matrix; equal subterms share a cache slot."""
        slot = self._slots.get(term)
        if slot is not None:
            return slot
        fn = self._term(term)
        key = len(self._slots)

        def cached(env, cache):
            value = cache.get(key)
            if value is None:
                value = cache[key] = fn(env, cache)
            return value

        self._slots[term] = cached
        return cached

    def _term(self, term):
        if isinstance(term, Var):
            name = term.name
            return lambda env, cache: env[name]
        if isinstance(term, One):
            identity = self._identity
            return lambda env, cache: identity
        if isinstance(term, Zero):
            zero = self._zero
            return lambda env, cache: zero
        if isinstance(term, Add):
            a, b = self.term(term.left), self.term(term.right)
            return lambda env, cache: a(env, cache) + b(env, cache)
        if isinstance(term, Mul):
            a, b = self.term(term.left), self.term(term.right)
            return lambda env, cache: a(env, cache) @ b(env, cache)
        if isinstance(term, Adjoint):
            a = self.term(term.term)
            return lambda env, cache: a(env, cache).conj().T
        if isinstance(term, ScaleTerm):
            a, s = self.term(term.term), term.scalar
            return lambda env, cache: s * a(env, cache)
        raise ValidationError(f"Not a term: {term!r}")

    def norm2(self, m):
        if self._scalar_rho is not None:
            return self._scalar_rho * float(np.linalg.norm(m))
        return float(np.linalg.norm(m @ self._rho_sqrt))

    # -- formulas ----------------------------------------------------------

    def compile(self, formula, depth=0):
        if isinstance(formula, Norm2):
            t = self.term(formula.term)
            return lambda env, cache, trace: self.norm2(t(env, cache))
        if isinstance(formula, Dist2):
            a, b = self.term(formula.left), self.term(formula.right)
            return lambda env, cache, trace: self.norm2(a(env, cache) - b(env, cache))
        if isinstance(formula, Const):
            value = formula.value
            return lambda env, cache, trace: value
        if isinstance(formula, (Max, Min)):
            fns = [self.compile(a, depth) for a in formula.args]
            pick = max if isinstance(formula, Max) else min
            return lambda env, cache, trace: pick(f(env, cache, trace) for f in fns)
        if isinstance(formula, Plus):
            a, b = self.compile(formula.left, depth), self.compile(formula.right, depth)
            return lambda env, cache, trace: a(env, cache, trace) + b(env, cache, trace)
        if isinstance(formula, DotMinus):
            a, b = self.compile(formula.left, depth), self.compile(formula.right, depth)
            return lambda env, cache, trace: max(a(env, cache, trace) - b(env, cache, trace), 0.0)
        if isinstance(formula, Sqrt):
            a = self.compile(formula.body, depth)
            return lambda env, cache, trace: math.sqrt(max(a(env, cache, trace), 0.0))
        if isinstance(formula, Square):
            a = self.compile(formula.body, depth)
            return lambda env, cache, trace: a(env, cache, trace) ** 2
        if isinstance(formula, Scale):
            a, factor = self.compile(formula.body, depth), formula.factor
            return lambda env, cache, trace: factor * a(env, cache, trace)
        if isinstance(formula, ApplyModulus):
            a, modulus = self.compile(formula.body, depth), formula.modulus
            return lambda env, cache, trace: modulus(a(env, cache, trace))
        if isinstance(formula, (Sup, Inf)):
            kind, variables, body = quantifier_block(formula)
            block_id = self._blocks
            self._blocks += 1
            body_fn = self.compile(body, depth + 1)
            return self.quantify(kind, variables, body, body_fn, depth, block_id)
        raise ValidationError(f"Not a formula: {formula!r}")

    def quantify(self, kind, variables, body, body_fn, depth, block_id):
        """Compiled block `kind variables . body`; implemented by subclasses."""
        raise NotImplementedError

    # -- variable parametrizations ----------------------------------------

    def search_space(self, variables):
        """SearchSpace of a block over the whole algebra."""
        return SearchSpace([(var, sort, self.algebra) for var, sort in variables])


class SearchSpace:
    """
    Joint real parametrization of the variables of a quantifier block.

    Each variable ranges over an algebra, the ambient one or a subalgebra of
    it: Ball variables through 2n coordinates clipped to the unit ball,
    Unitary variables as exp(i h) for the n coordinates of a self-adjoint h.
    """

    def __init__(self, entries):
        """
        Args:
            entries: [(var, sort, algebra)] in block order
        """
        self.entries = []
        offset = 0
        for var, sort, algebra in entries:
            width = algebra.dimension if sort is Sort.UNITARY else 2 * algebra.dimension
            self.entries.append((var, sort, algebra, offset, offset + width))
            offset += width
        self.size = offset

    def decode(self, params):
        values = {}
        for var, sort, algebra, start, stop in self.entries:
            if sort is Sort.UNITARY:
                values[var] = algebra.unitary_point(params[start:stop])
            else:
                values[var] = algebra.ball_point(params[start:stop])
        return values

    def encode(self, var, matrix):
        """Coordinates of one variable's value, written into a fresh slice."""
        for name, sort, algebra, _, _ in self.entries:
            if name == var:
                if sort is Sort.UNITARY:
                    return algebra.unitary_parameters(matrix)
                return algebra.real_coordinates(matrix)
        raise KeyError(var)

    def project(self, params):
        """Replace Ball coordinates outside the unit ball by those of their clipping."""
        params = np.array(params, dtype=float)
        for _, sort, algebra, start, stop in self.entries:
            if sort is Sort.UNITARY:
                continue
            x = algebra.from_real(params[start:stop])
            clipped = clip_to_ball(x)
            if clipped is not x:
                params[start:stop] = algebra.real_coordinates(clipped)
        return params
