"""
LaTeX emitter in the usual display style: consecutive same-kind quantifiers
share one operator, commutators print as [a,b], and u x u* as conjugation.
"""
import re

from .syntax import (
    Var, One, Zero, Add, Mul, Adjoint, ScaleTerm,
    Norm2, Dist2, Const, Max, Min, Plus, DotMinus, Sqrt, Square, Scale,
    ApplyModulus, Sup, Inf, as_commutator,
)

DOTMINUS = r'\mathbin{\dot{-}}'

_NAME = re.compile(r"^([A-Za-z]+)(\d*)([a-z]?)((?:'|_\d+|#\d+)*)(?:\.(\d+))?$")


def latex_name(name):
    """U1a.2 -> U_{1a}^{(2)}, X' -> X'."""
    match = _NAME.match(name)
    if not match:
        return r'\mathrm{' + name.replace('_', r'\_').replace('#', r'\#') + '}'
    letters, digits, tail, marks, level = match.groups()
    out = letters
    sub = digits + tail
    marks = marks.replace('#', '_')
    if sub:
        out += '_{' + sub + '}'
    if marks:
        out += marks.replace('_', r'\_')
    if level:
        out += '^{(' + level + ')}'
    return out


def _number(value):
    if float(value).is_integer():
        return str(int(value))
    return f"{value:g}"


def _scalar(c):
    if c.imag == 0:
        return _number(c.real)
    if c.real == 0:
        return ('' if c.imag == 1 else '-' if c.imag == -1 else _number(c.imag)) + 'i'
    return f"({_number(c.real)}{'+' if c.imag >= 0 else '-'}{_number(abs(c.imag))}i)"


def term_to_latex(term):
    pair = as_commutator(term)
    if pair is not None:
        return f"[{term_to_latex(pair[0])},{term_to_latex(pair[1])}]"
    if isinstance(term, Var):
        return latex_name(term.name)
    if isinstance(term, One):
        return '1'
    if isinstance(term, Zero):
        return '0'
    if isinstance(term, Add):
        left, right = term_to_latex(term.left), term_to_latex(term.right)
        return left + right if right.startswith('-') else f"{left}+{right}"
    if isinstance(term, Mul):
        left, right = term_to_latex(term.left), term_to_latex(term.right)
        if isinstance(term.left, Add):
            left = f"({left})"
        if isinstance(term.right, Add):
            right = f"({right})"
        return left + right
    if isinstance(term, Adjoint):
        inner = term_to_latex(term.term)
        return f"{inner}^*" if isinstance(term.term, Var) else f"({inner})^*"
    if isinstance(term, ScaleTerm):
        scalar = '-' if term.scalar == -1 else _scalar(term.scalar)
        return f"{scalar}({term_to_latex(term.term)})"
    raise TypeError(f"Not a term: {term!r}")


def _quantifier_run(formula):
    kind = formula.kind
    names = []
    node = formula
    while isinstance(node, (Sup, Inf)) and node.kind is kind:
        names.append(latex_name(node.var))
        node = node.body
    return kind, names, node


def to_latex(formula):
    """Render a formula as a LaTeX math string."""
    if isinstance(formula, Norm2):
        return r'\|' + term_to_latex(formula.term) + r'\|_2'
    if isinstance(formula, Dist2):
        return f"d({term_to_latex(formula.left)},{term_to_latex(formula.right)})"
    if isinstance(formula, Const):
        return _number(formula.value)
    if isinstance(formula, (Max, Min)):
        op = r'\max' if isinstance(formula, Max) else r'\min'
        return op + '(' + ', '.join(to_latex(a) for a in formula.args) + ')'
    if isinstance(formula, Plus):
        return f"{to_latex(formula.left)}+{to_latex(formula.right)}"
    if isinstance(formula, DotMinus):
        return f"({to_latex(formula.left)}){DOTMINUS}({to_latex(formula.right)})"
    if isinstance(formula, Sqrt):
        return r'\sqrt{' + to_latex(formula.body) + '}'
    if isinstance(formula, Square):
        body = to_latex(formula.body)
        if isinstance(formula.body, (Norm2, Dist2, Const)):
            return body + '^2'
        return f"({body})^2"
    if isinstance(formula, Scale):
        return f"{_number(formula.factor)}({to_latex(formula.body)})"
    if isinstance(formula, ApplyModulus):
        modulus = formula.modulus
        if modulus.is_linear:
            return f"{_number(modulus.lipschitz)}({to_latex(formula.body)})"
        coeffs = ','.join(_number(c) for c in modulus.coefficients)
        return r'\alpha_{' + coeffs + '}(' + to_latex(formula.body) + ')'
    if isinstance(formula, (Sup, Inf)):
        kind, names, body = _quantifier_run(formula)
        return '\\' + kind.value + '_{' + ','.join(names) + '}' + to_latex(body)
    raise TypeError(f"Not a formula: {formula!r}")
