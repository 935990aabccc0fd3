"""
Continuity Moduli

A modulus is a function alpha(t) = sum_k c_k * t**(1/2**k) with c_k >= 0.
The family contains the Lipschitz moduli L*t and L*t + K*sqrt(t), has
alpha(0) = 0, is nondecreasing, and is closed under every connective of the
formula grammar, including square roots.
"""
import math
from dataclasses import dataclass
from typing import Tuple

from errors import ValidationError
from .syntax import (
    Var, One, Zero, Add, Mul, Adjoint, ScaleTerm,
    Norm2, Dist2, Const, Max, Min, Plus, DotMinus, Sqrt, Square, Scale,
    ApplyModulus, Sup, Inf, free_variables,
)


@dataclass(frozen=True)
class Modulus:
    """
    Nondecreasing continuity modulus with dyadic exponents.

    Attributes:
        coefficients: c_k multiplying t**(1/2**k), trailing zeros stripped
    """

    coefficients: Tuple[float, ...] = ()

    def __post_init__(self):
        coeffs = [float(c) for c in self.coefficients]
        if any(not c >= 0 or math.isinf(c) for c in coeffs):
            raise ValidationError(f"Modulus coefficients must be finite and nonnegative, got {coeffs}")
        while coeffs and coeffs[-1] == 0.0:
            coeffs.pop()
        object.__setattr__(self, 'coefficients', tuple(coeffs))

    @classmethod
    def zero(cls):
        return cls(())

    @classmethod
    def linear(cls, lipschitz):
        return cls((lipschitz,))

    @classmethod
    def from_parts(cls, lipschitz=0.0, sqrt_coefficient=0.0):
        """alpha(t) = lipschitz*t + sqrt_coefficient*sqrt(t)."""
        return cls((lipschitz, sqrt_coefficient))

    @property
    def lipschitz(self):
        return self.coefficients[0] if self.coefficients else 0.0

    @property
    def sqrt_coefficient(self):
        return self.coefficients[1] if len(self.coefficients) > 1 else 0.0

    @property
    def is_zero(self):
        return not self.coefficients

    @property
    def is_linear(self):
        return len(self.coefficients) <= 1

    def __call__(self, t):
        t = max(float(t), 0.0)
        return sum(c * t ** (0.5 ** k) for k, c in enumerate(self.coefficients))

    def _padded(self, other):
        size = max(len(self.coefficients), len(other.coefficients))
        a = self.coefficients + (0.0,) * (size - len(self.coefficients))
        b = other.coefficients + (0.0,) * (size - len(other.coefficients))
        return a, b

    def __add__(self, other):
        a, b = self._padded(other)
        return Modulus(tuple(x + y for x, y in zip(a, b)))

    def maximum(self, other):
        """Pointwise upper bound of max(self, other)."""
        a, b = self._padded(other)
        return Modulus(tuple(max(x, y) for x, y in zip(a, b)))

    def scaled(self, factor):
        if factor < 0:
            raise ValidationError(f"Moduli scale by nonnegative factors, got {factor}")
        return Modulus(tuple(factor * c for c in self.coefficients))

    def sqrt(self):
        """Modulus of sqrt(phi) given the modulus of phi: sqrt(sum) <= sum of sqrts."""
        return Modulus((0.0,) + tuple(math.sqrt(c) for c in self.coefficients))

    def compose(self, inner):
        """
        Modulus of self applied after `inner`.

        Uses (a + b)**e <= a**e + b**e for exponents e <= 1.
        """
        if self.is_zero or inner.is_zero:
            return Modulus.zero()
        size = len(self.coefficients) + len(inner.coefficients) - 1
        result = [0.0] * size
        for k, a in enumerate(self.coefficients):
            for j, b in enumerate(inner.coefficients):
                result[k + j] += a * b ** (0.5 ** k)
        return Modulus(tuple(result))

    def describe(self):
        if self.is_zero:
            return "0"
        parts = []
        for k, c in enumerate(self.coefficients):
            if c == 0:
                continue
            power = "t" if k == 0 else f"t^(1/{2 ** k})"
            parts.append(f"{c:g}*{power}")
        return " + ".join(parts)

    def to_list(self):
        return list(self.coefficients)


# ---------------------------------------------------------------------------
# Term and formula bounds
# ---------------------------------------------------------------------------

def term_bound(term):
    """Operator-norm bound of a term when every variable lies in the unit ball."""
    if isinstance(term, (Var, One)):
        return 1.0
    if isinstance(term, Zero):
        return 0.0
    if isinstance(term, Add):
        return term_bound(term.left) + term_bound(term.right)
    if isinstance(term, Mul):
        return term_bound(term.left) * term_bound(term.right)
    if isinstance(term, Adjoint):
        return term_bound(term.term)
    if isinstance(term, ScaleTerm):
        return abs(term.scalar) * term_bound(term.term)
    raise ValidationError(f"Not a term: {term!r}")


def term_lipschitz(term, var):
    """
    Lipschitz constant of a term in `var` for the trace-norm distance.

    Relies on ||ab||_2 <= ||a|| ||b||_2 and ||ab||_2 <= ||a||_2 ||b||.
    """
    if isinstance(term, Var):
        return 1.0 if term.name == var else 0.0
    if isinstance(term, (One, Zero)):
        return 0.0
    if isinstance(term, Add):
        return term_lipschitz(term.left, var) + term_lipschitz(term.right, var)
    if isinstance(term, Mul):
        return (term_lipschitz(term.left, var) * term_bound(term.right)
                + term_bound(term.left) * term_lipschitz(term.right, var))
    if isinstance(term, Adjoint):
        return term_lipschitz(term.term, var)
    if isinstance(term, ScaleTerm):
        return abs(term.scalar) * term_lipschitz(term.term, var)
    raise ValidationError(f"Not a term: {term!r}")


def value_bound(formula):
    """Upper bound of a formula's value when every variable lies in the unit ball."""
    if isinstance(formula, Norm2):
        return term_bound(formula.term)
    if isinstance(formula, Dist2):
        return term_bound(formula.left) + term_bound(formula.right)
    if isinstance(formula, Const):
        return formula.value
    if isinstance(formula, (Max, Min)):
        return max(value_bound(a) for a in formula.args)
    if isinstance(formula, Plus):
        return value_bound(formula.left) + value_bound(formula.right)
    if isinstance(formula, DotMinus):
        return value_bound(formula.left)
    if isinstance(formula, Sqrt):
        return math.sqrt(value_bound(formula.body))
    if isinstance(formula, Square):
        return value_bound(formula.body) ** 2
    if isinstance(formula, Scale):
        return formula.factor * value_bound(formula.body)
    if isinstance(formula, ApplyModulus):
        return formula.modulus(value_bound(formula.body))
    if isinstance(formula, (Sup, Inf)):
        return value_bound(formula.body)
    raise ValidationError(f"Not a formula: {formula!r}")


def _modulus(formula, var):
    if isinstance(formula, Norm2):
        return Modulus.linear(term_lipschitz(formula.term, var))
    if isinstance(formula, Dist2):
        return Modulus.linear(term_lipschitz(formula.left, var) + term_lipschitz(formula.right, var))
    if isinstance(formula, Const):
        return Modulus.zero()
    if isinstance(formula, (Max, Min)):
        result = Modulus.zero()
        for arg in formula.args:
            result = result.maximum(_modulus(arg, var))
        return result
    if isinstance(formula, (Plus, DotMinus)):
        return _modulus(formula.left, var) + _modulus(formula.right, var)
    if isinstance(formula, Sqrt):
        return _modulus(formula.body, var).sqrt()
    if isinstance(formula, Square):
        # |a^2 - b^2| <= 2V |a - b|
        return _modulus(formula.body, var).scaled(2 * value_bound(formula.body))
    if isinstance(formula, Scale):
        return _modulus(formula.body, var).scaled(formula.factor)
    if isinstance(formula, ApplyModulus):
        return formula.modulus.compose(_modulus(formula.body, var))
    if isinstance(formula, (Sup, Inf)):
        if formula.var == var:
            return Modulus.zero()
        return _modulus(formula.body, var)
    raise ValidationError(f"Not a formula: {formula!r}")


def modulus_of(formula, var):
    """
    Continuity modulus of a formula in one free variable.

    Args:
        formula: Formula
        var: Name of a variable free in `formula`

    Returns:
        Modulus alpha with |phi(x) - phi(x')| <= alpha(||x - x'||_2) whenever
        all variables range over the operator-norm unit ball
    """
    if var not in free_variables(formula):
        raise ValidationError(f"Variable {var!r} is not free in the formula")
    return _modulus(formula, var)


def occurrence_modulus(formula, var):
    """Like modulus_of, but the zero modulus when `var` does not occur free."""
    if var not in free_variables(formula):
        return Modulus.zero()
    return _modulus(formula, var)
