"""
Formulas Module

Syntax trees, continuity moduli, the named sentence builders, the
constrained-quantification transforms and their JSON / LaTeX encodings.
"""
import sys

from .syntax import (
    Sort, QuantKind, Var, One, Zero, Add, Mul, Adjoint, ScaleTerm,
    Norm2, Dist2, Const, Max, Min, Plus, DotMinus, Sqrt, Square, Scale,
    ApplyModulus, Sup, Inf, commutator, conjugate, free_variables,
    bound_variables, is_sentence, is_quantifier_free, formula_size,
)
from .modulus import Modulus, modulus_of, term_bound, value_bound
from .builders import (
    build_chi, build_psi_m, build_tau_m, build_phi_good, build_phi_leq,
    build_theta, compute_delta, SentenceSpec,
)
from .transforms import hat_transform, build_zeta, bar_transform, relativize
from .codec import formula_to_json, formula_from_json, dumps, loads
from .latex import to_latex

# theta_n nests a few hundred levels deep at n = 6
if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)

__all__ = [
    'Sort', 'QuantKind', 'Var', 'One', 'Zero', 'Add', 'Mul', 'Adjoint', 'ScaleTerm',
    'Norm2', 'Dist2', 'Const', 'Max', 'Min', 'Plus', 'DotMinus', 'Sqrt', 'Square',
    'Scale', 'ApplyModulus', 'Sup', 'Inf', 'commutator', 'conjugate',
    'free_variables', 'bound_variables', 'is_sentence', 'is_quantifier_free',
    'formula_size', 'Modulus', 'modulus_of', 'term_bound', 'value_bound',
    'build_chi', 'build_psi_m', 'build_tau_m', 'build_phi_good', 'build_phi_leq',
    'build_theta', 'compute_delta', 'SentenceSpec', 'hat_transform', 'build_zeta',
    'bar_transform', 'relativize', 'formula_to_json', 'formula_from_json',
    'dumps', 'loads', 'to_latex',
]
