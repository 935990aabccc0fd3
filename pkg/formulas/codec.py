"""
JSON Codec for Terms and Formulas

Tagged-union encoding: every node is an object whose "kind" names the
variant. Complex scalars are {"re": .., "im": ..}. The schema is listed in
README.md.
"""
import json

from errors import ValidationError
from .modulus import Modulus
from .syntax import (
    Var, One, Zero, Add, Mul, Adjoint, ScaleTerm,
    Norm2, Dist2, Const, Max, Min, Plus, DotMinus, Sqrt, Square, Scale,
    ApplyModulus, Sup, Inf, Sort,
)

SCHEMA_VERSION = 1

_BINARY_TERMS = {'add': Add, 'mul': Mul}
_BINARY_FORMULAS = {'plus': Plus, 'dotminus': DotMinus}
_UNARY_FORMULAS = {'sqrt': Sqrt, 'square': Square}


def term_to_json(term):
    if isinstance(term, Var):
        return {'kind': 'var', 'name': term.name}
    if isinstance(term, One):
        return {'kind': 'one'}
    if isinstance(term, Zero):
        return {'kind': 'zero'}
    if isinstance(term, (Add, Mul)):
        return {'kind': 'add' if isinstance(term, Add) else 'mul',
                'left': term_to_json(term.left), 'right': term_to_json(term.right)}
    if isinstance(term, Adjoint):
        return {'kind': 'adjoint', 'term': term_to_json(term.term)}
    if isinstance(term, ScaleTerm):
        return {'kind': 'scale_term',
                'scalar': {'re': term.scalar.real, 'im': term.scalar.imag},
                'term': term_to_json(term.term)}
    raise ValidationError(f"Cannot encode term {term!r}")


def formula_to_json(formula):
    """Encode a formula as JSON-compatible nested dicts."""
    if isinstance(formula, Norm2):
        return {'kind': 'norm2', 'term': term_to_json(formula.term)}
    if isinstance(formula, Dist2):
        return {'kind': 'dist2', 'left': term_to_json(formula.left),
                'right': term_to_json(formula.right)}
    if isinstance(formula, Const):
        return {'kind': 'const', 'value': formula.value}
    if isinstance(formula, (Max, Min)):
        return {'kind': 'max' if isinstance(formula, Max) else 'min',
                'args': [formula_to_json(a) for a in formula.args]}
    if isinstance(formula, (Plus, DotMinus)):
        return {'kind': 'plus' if isinstance(formula, Plus) else 'dotminus',
                'left': formula_to_json(formula.left),
                'right': formula_to_json(formula.right)}
    if isinstance(formula, (Sqrt, Square)):
        return {'kind': 'sqrt' if isinstance(formula, Sqrt) else 'square',
                'body': formula_to_json(formula.body)}
    if isinstance(formula, Scale):
        return {'kind': 'scale', 'factor': formula.factor, 'body': formula_to_json(formula.body)}
    if isinstance(formula, ApplyModulus):
        return {'kind': 'modulus', 'coefficients': formula.modulus.to_list(),
                'body': formula_to_json(formula.body)}
    if isinstance(formula, (Sup, Inf)):
        return {'kind': formula.kind.value, 'var': formula.var, 'sort': formula.sort.value,
                'body': formula_to_json(formula.body)}
    raise ValidationError(f"Cannot encode formula {formula!r}")


def _field(node, key):
    try:
        return node[key]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"Malformed node, missing {key!r}: {node!r}") from exc


def term_from_json(node):
    kind = _field(node, 'kind')
    if kind == 'var':
        return Var(_field(node, 'name'))
    if kind == 'one':
        return One()
    if kind == 'zero':
        return Zero()
    if kind in _BINARY_TERMS:
        return _BINARY_TERMS[kind](term_from_json(_field(node, 'left')),
                                   term_from_json(_field(node, 'right')))
    if kind == 'adjoint':
        return Adjoint(term_from_json(_field(node, 'term')))
    if kind == 'scale_term':
        scalar = _field(node, 'scalar')
        return ScaleTerm(complex(_field(scalar, 're'), _field(scalar, 'im')),
                         term_from_json(_field(node, 'term')))
    raise ValidationError(f"Unknown term kind {kind!r}")


def formula_from_json(node):
    """Decode the output of formula_to_json."""
    kind = _field(node, 'kind')
    if kind == 'norm2':
        return Norm2(term_from_json(_field(node, 'term')))
    if kind == 'dist2':
        return Dist2(term_from_json(_field(node, 'left')), term_from_json(_field(node, 'right')))
    if kind == 'const':
        return Const(_field(node, 'value'))
    if kind in ('max', 'min'):
        args = tuple(formula_from_json(a) for a in _field(node, 'args'))
        return Max(args) if kind == 'max' else Min(args)
    if kind in _BINARY_FORMULAS:
        return _BINARY_FORMULAS[kind](formula_from_json(_field(node, 'left')),
                                      formula_from_json(_field(node, 'right')))
    if kind in _UNARY_FORMULAS:
        return _UNARY_FORMULAS[kind](formula_from_json(_field(node, 'body')))
    if kind == 'scale':
        return Scale(_field(node, 'factor'), formula_from_json(_field(node, 'body')))
    if kind == 'modulus':
        return ApplyModulus(Modulus(tuple(_field(node, 'coefficients'))),
                            formula_from_json(_field(node, 'body')))
    if kind in ('sup', 'inf'):
        try:
            sort = Sort(_field(node, 'sort'))
        except ValueError as exc:
            raise ValidationError(f"Unknown sort {node.get('sort')!r}") from exc
        cls = Sup if kind == 'sup' else Inf
        return cls(_field(node, 'var'), sort, formula_from_json(_field(node, 'body')))
    raise ValidationError(f"Unknown formula kind {kind!r}")


def dumps(formula, indent=None):
    """Serialize a formula inside a versioned envelope."""
    return json.dumps({'schema': SCHEMA_VERSION, 'formula': formula_to_json(formula)}, indent=indent)


def loads(text):
    """Parse a formula from dumps() output, or from a bare formula node."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"Invalid formula JSON: {exc}") from exc
    if isinstance(payload, dict) and 'formula' in payload:
        if payload.get('schema', SCHEMA_VERSION) != SCHEMA_VERSION:
            raise ValidationError(f"Unsupported formula schema {payload.get('schema')!r}")
        payload = payload['formula']
    return formula_from_json(payload)
