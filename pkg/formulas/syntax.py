"""
Formula Syntax

Immutable syntax trees for the continuous logic of tracial von Neumann
algebras: terms built from variables, 1, 0, sums, products, adjoints and
scalar multiples, and real-valued formulas built from trace norms, connectives
and sup/inf quantifiers.
"""
from dataclasses import dataclass
from enum import Enum
from typing import ClassVar, Tuple, Union

from errors import ValidationError


class Sort(str, Enum):
    """Range of a quantified variable."""

    BALL = 'ball'  # Operator-norm unit ball
    UNITARY = 'unitary'


class QuantKind(str, Enum):
    """Quantifier kind."""

    SUP = 'sup'
    INF = 'inf'

    def flipped(self):
        return QuantKind.INF if self is QuantKind.SUP else QuantKind.SUP


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    """
    Variable occurrence.

    Occurrences carry no sort. A bound variable takes the sort of its Sup or
    Inf binder (see quantified_sorts); a free variable takes the sort given
    by the Assignment that supplies its value.
    """

    name: str

    def __post_init__(self):
        if not isinstance(self.name, str) or not self.name:
            raise ValidationError(f"Variable name must be a non-empty string, got {self.name!r}")


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class Add:
    left: 'Term'
    right: 'Term'


@dataclass(frozen=True)
class Mul:
    left: 'Term'
    right: 'Term'


@dataclass(frozen=True)
class Adjoint:
    term: 'Term'


@dataclass(frozen=True)
class ScaleTerm:
    scalar: complex
    term: 'Term'

    def __post_init__(self):
        object.__setattr__(self, 'scalar', complex(self.scalar))


Term = Union[Var, One, Zero, Add, Mul, Adjoint, ScaleTerm]
TERM_TYPES = (Var, One, Zero, Add, Mul, Adjoint, ScaleTerm)


def commutator(a, b):
    """[a, b] = ab - ba."""
    return Add(Mul(a, b), ScaleTerm(-1, Mul(b, a)))


def conjugate(u, x):
    """u x u*."""
    return Mul(Mul(u, x), Adjoint(u))


def as_commutator(term):
    """Return (a, b) if `term` is the commutator sugar [a, b], else None."""
    if (isinstance(term, Add) and isinstance(term.left, Mul)
            and isinstance(term.right, ScaleTerm) and term.right.scalar == -1
            and isinstance(term.right.term, Mul)):
        a, b = term.left.left, term.left.right
        if term.right.term == Mul(b, a):
            return a, b
    return None


def term_variables(term):
    """Variable names occurring in a term."""
    if isinstance(term, Var):
        return frozenset([term.name])
    if isinstance(term, (One, Zero)):
        return frozenset()
    if isinstance(term, (Add, Mul)):
        return term_variables(term.left) | term_variables(term.right)
    if isinstance(term, (Adjoint, ScaleTerm)):
        return term_variables(term.term)
    raise ValidationError(f"Not a term: {term!r}")


def rename_term(term, old, new):
    """Replace variable `old` by `new` in a term."""
    if isinstance(term, Var):
        return Var(new) if term.name == old else term
    if isinstance(term, (One, Zero)):
        return term
    if isinstance(term, Add):
        return Add(rename_term(term.left, old, new), rename_term(term.right, old, new))
    if isinstance(term, Mul):
        return Mul(rename_term(term.left, old, new), rename_term(term.right, old, new))
    if isinstance(term, Adjoint):
        return Adjoint(rename_term(term.term, old, new))
    if isinstance(term, ScaleTerm):
        return ScaleTerm(term.scalar, rename_term(term.term, old, new))
    raise ValidationError(f"Not a term: {term!r}")


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Norm2:
    term: Term


@dataclass(frozen=True)
class Dist2:
    left: Term
    right: Term


@dataclass(frozen=True)
class Const:
    value: float

    def __post_init__(self):
        value = float(self.value)
        if not value >= 0:
            raise ValidationError(f"Constants must be nonnegative reals, got {self.value!r}")
        object.__setattr__(self, 'value', value)


@dataclass(frozen=True)
class _Lattice:
    args: Tuple['Formula', ...]

    def __post_init__(self):
        args = tuple(self.args)
        if not args:
            raise ValidationError(f"{type(self).__name__} needs at least one argument")
        object.__setattr__(self, 'args', args)


@dataclass(frozen=True)
class Max(_Lattice):
    pass


@dataclass(frozen=True)
class Min(_Lattice):
    pass


@dataclass(frozen=True)
class Plus:
    left: 'Formula'
    right: 'Formula'


@dataclass(frozen=True)
class DotMinus:
    """Truncated subtraction max(left - right, 0)."""

    left: 'Formula'
    right: 'Formula'


@dataclass(frozen=True)
class Sqrt:
    body: 'Formula'


@dataclass(frozen=True)
class Square:
    body: 'Formula'


@dataclass(frozen=True)
class Scale:
    factor: float
    body: 'Formula'

    def __post_init__(self):
        factor = float(self.factor)
        if not factor >= 0:
            raise ValidationError(f"Scale factors must be nonnegative, got {self.factor!r}")
        object.__setattr__(self, 'factor', factor)


@dataclass(frozen=True)
class ApplyModulus:
    modulus: 'Modulus'  # formulas.modulus.Modulus
    body: 'Formula'


@dataclass(frozen=True)
class _Quantifier:
    var: str
    sort: Sort
    body: 'Formula'

    kind: ClassVar[QuantKind]

    def __post_init__(self):
        if not isinstance(self.var, str) or not self.var:
            raise ValidationError(f"Quantified variable must be a non-empty name, got {self.var!r}")
        object.__setattr__(self, 'sort', Sort(self.sort))


@dataclass(frozen=True)
class Sup(_Quantifier):
    kind: ClassVar[QuantKind] = QuantKind.SUP


@dataclass(frozen=True)
class Inf(_Quantifier):
    kind: ClassVar[QuantKind] = QuantKind.INF


Formula = Union[Norm2, Dist2, Const, Max, Min, Plus, DotMinus, Sqrt, Square,
                Scale, ApplyModulus, Sup, Inf]
ATOMIC_TYPES = (Norm2, Dist2, Const)
QUANTIFIER_TYPES = (Sup, Inf)


def quantifier(kind, var, sort, body):
    """Build a Sup or Inf node from its kind."""
    return Sup(var, sort, body) if QuantKind(kind) is QuantKind.SUP else Inf(var, sort, body)


def is_quantifier(formula):
    return isinstance(formula, QUANTIFIER_TYPES)


def children(formula):
    """Immediate subformulas, in argument order."""
    if isinstance(formula, ATOMIC_TYPES):
        return ()
    if isinstance(formula, (Max, Min)):
        return formula.args
    if isinstance(formula, (Plus, DotMinus)):
        return (formula.left, formula.right)
    if isinstance(formula, (Sqrt, Square, Scale, ApplyModulus, Sup, Inf)):
        return (formula.body,)
    raise ValidationError(f"Not a formula: {formula!r}")


def polarities(formula):
    """
    Monotonicity of a connective in each argument.

    Returns:
        Tuple of +1 (nondecreasing) or -1 (nonincreasing), one per child
    """
    if isinstance(formula, DotMinus):
        return (1, -1)
    return tuple(1 for _ in children(formula))


def with_children(formula, new_children):
    """Rebuild a connective or quantifier node over new subformulas."""
    new_children = tuple(new_children)
    if isinstance(formula, ATOMIC_TYPES):
        return formula
    if isinstance(formula, (Max, Min)):
        return type(formula)(new_children)
    if isinstance(formula, (Plus, DotMinus)):
        return type(formula)(*new_children)
    if isinstance(formula, (Sqrt, Square)):
        return type(formula)(new_children[0])
    if isinstance(formula, Scale):
        return Scale(formula.factor, new_children[0])
    if isinstance(formula, ApplyModulus):
        return ApplyModulus(formula.modulus, new_children[0])
    if isinstance(formula, (Sup, Inf)):
        return type(formula)(formula.var, formula.sort, new_children[0])
    raise ValidationError(f"Not a formula: {formula!r}")


def atom_terms(formula):
    if isinstance(formula, Norm2):
        return (formula.term,)
    if isinstance(formula, Dist2):
        return (formula.left, formula.right)
    return ()


def free_variables(formula):
    """Names occurring free in a formula."""
    if isinstance(formula, ATOMIC_TYPES):
        names = frozenset()
        for term in atom_terms(formula):
            names |= term_variables(term)
        return names
    if isinstance(formula, (Sup, Inf)):
        return free_variables(formula.body) - {formula.var}
    names = frozenset()
    for child in children(formula):
        names |= free_variables(child)
    return names


def bound_variables(formula):
    """Names bound by some quantifier of the formula."""
    names = set()
    stack = [formula]
    while stack:
        node = stack.pop()
        if isinstance(node, (Sup, Inf)):
            names.add(node.var)
        stack.extend(children(node))
    return frozenset(names)


def all_names(formula):
    """Every variable name appearing in the formula, free or bound."""
    names = set()
    stack = [formula]
    while stack:
        node = stack.pop()
        if isinstance(node, (Sup, Inf)):
            names.add(node.var)
        for term in atom_terms(node):
            names |= term_variables(term)
        stack.extend(children(node))
    return frozenset(names)


def is_sentence(formula):
    return not free_variables(formula)


def is_quantifier_free(formula):
    stack = [formula]
    while stack:
        node = stack.pop()
        if isinstance(node, (Sup, Inf)):
            return False
        stack.extend(children(node))
    return True


def quantified_sorts(formula):
    """Map of bound variable name to its sort."""
    sorts = {}
    stack = [formula]
    while stack:
        node = stack.pop()
        if isinstance(node, (Sup, Inf)):
            sorts[node.var] = node.sort
        stack.extend(children(node))
    return sorts


def rename_free(formula, old, new):
    """
    Rename free occurrences of `old` to `new`.

    The caller guarantees `new` is not bound anywhere inside `formula`.
    """
    if isinstance(formula, Norm2):
        return Norm2(rename_term(formula.term, old, new))
    if isinstance(formula, Dist2):
        return Dist2(rename_term(formula.left, old, new), rename_term(formula.right, old, new))
    if isinstance(formula, Const):
        return formula
    if isinstance(formula, (Sup, Inf)) and formula.var == old:
        return formula
    return with_children(formula, [rename_free(c, old, new) for c in children(formula)])


def fresh_name(base, taken):
    """`base` if unused, else `base_k` for the smallest free k."""
    if base not in taken:
        return base
    k = 1
    while f"{base}_{k}" in taken:
        k += 1
    return f"{base}_{k}"


def formula_size(formula):
    """Number of formula nodes (terms not counted)."""
    count = 0
    stack = [formula]
    while stack:
        node = stack.pop()
        count += 1
        stack.extend(children(node))
    return count


def require_distinct(*names):
    """Reject repeated variable names."""
    seen = set()
    for name in names:
        if name in seen:
            raise ValidationError(f"Variable names must be distinct, {name!r} repeats in {list(names)}")
        seen.add(name)
