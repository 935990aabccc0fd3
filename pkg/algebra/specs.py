"""
Algebra and Unitary Specs

Algebras are described by JSON specs (files under data/algebras/ or inline)
or by short names:

    {"matrix": k}                          M_k
    {"group": "S3"} | {"group": {"table": [[...]]}}    group algebra
    {"power": ["Z2", 3]} | {"wreath": ["Z2", 3]}       group algebra of G^k, G wr S_k
    {"tensor": [spec, spec]}
    {"direct_sum": [spec, spec], "weights": [w1, w2]}

    names: M<k>, Z2, Z3, Z4, S3, power:<G>:<k>, wreath:<G>:<k>

Unitaries are given as {"element": g}, {"identity": true}, {"clock": true},
{"shift": true} or {"matrix": [[[re, im], ...], ...]}.
"""
import json
import os
import re

import numpy as np

from errors import ValidationError
from .groups import FiniteGroup, named_group, direct_power, wreath, symmetric_group, cyclic_group
from .tracial import (
    matrix_algebra, group_algebra, tensor, direct_sum, clock_matrix, shift_matrix,
    is_unitary,
)

_MATRIX_NAME = re.compile(r'^M(\d+)$')


def matrix_to_pairs(m):
    """Row-major matrix as nested [re, im] pairs."""
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def pairs_to_matrix(rows):
    try:
        arr = np.asarray(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"Matrix entries must be [re, im] pairs: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"Expected a square matrix of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def read_json(text):
    """Parse inline JSON, or load it from a file path."""
    if os.path.exists(text):
        with open(text, 'r', encoding='utf-8') as f:
            try:
                return json.load(f)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"Invalid JSON in {text}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return None


def group_from_spec(spec):
    """FiniteGroup from a name or a group spec."""
    if isinstance(spec, str):
        if spec.startswith('power:') or spec.startswith('wreath:'):
            return group_from_spec(_parse_constructor_name(spec))
        return named_group(spec)
    if not isinstance(spec, dict):
        raise ValidationError(f"Invalid group spec {spec!r}")
    if 'table' in spec:
        return FiniteGroup(spec['table'], name=spec.get('name'))
    if 'power' in spec:
        base, k = _pair_arg(spec['power'], 'power')
        return direct_power(group_from_spec(base), k)
    if 'wreath' in spec:
        base, k = _pair_arg(spec['wreath'], 'wreath')
        return wreath(group_from_spec(base), k)
    if 'symmetric' in spec:
        return symmetric_group(spec['symmetric'])
    if 'cyclic' in spec:
        return cyclic_group(spec['cyclic'])
    raise ValidationError(f"Unknown group spec keys {sorted(spec)}")


def _pair_arg(value, label):
    if not isinstance(value, (list, tuple)) or len(value) != 2 or not isinstance(value[1], int):
        raise ValidationError(f"{label} expects [group, k], got {value!r}")
    return value[0], value[1]


def _parse_constructor_name(name):
    parts = name.split(':')
    if len(parts) != 3 or not parts[2].isdigit():
        raise ValidationError(f"Expected {parts[0]}:<group>:<k>, got {name!r}")
    return {parts[0]: [parts[1], int(parts[2])]}


def parse_algebra_name(name):
    """Spec dict for a short algebra name."""
    match = _MATRIX_NAME.match(name)
    if match:
        return {'matrix': int(match.group(1))}
    if name.startswith('power:') or name.startswith('wreath:'):
        return _parse_constructor_name(name)
    return {'group': name}


def algebra_from_spec(spec):
    """
    Build a TracialAlgebra from a spec dict.

    Returns:
        TracialAlgebra with `spec` set to the canonical spec
    """
    if not isinstance(spec, dict) or not spec:
        raise ValidationError(f"Invalid algebra spec {spec!r}")
    if 'matrix' in spec:
        algebra = matrix_algebra(spec['matrix'])
    elif 'group' in spec:
        algebra = group_algebra(group_from_spec(spec['group']))
    elif 'power' in spec or 'wreath' in spec:
        algebra = group_algebra(group_from_spec(spec))
    elif 'tensor' in spec:
        a, b = _two_specs(spec['tensor'], 'tensor')
        algebra = tensor(algebra_from_spec(a), algebra_from_spec(b))
    elif 'direct_sum' in spec:
        a, b = _two_specs(spec['direct_sum'], 'direct_sum')
        algebra = direct_sum(algebra_from_spec(a), algebra_from_spec(b), spec.get('weights', (0.5, 0.5)))
    else:
        raise ValidationError(f"Unknown algebra spec keys {sorted(spec)}")
    algebra.spec = canonical_spec(spec)
    return algebra


def _two_specs(value, label):
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ValidationError(f"{label} expects two algebra specs")
    return [parse_algebra_name(v) if isinstance(v, str) else v for v in value]


def canonical_spec(spec):
    """Key-sorted round trip, the form recorded in provenance blocks."""
    return json.loads(json.dumps(spec, sort_keys=True))


def resolve_algebra(text):
    """
    Algebra from a CLI argument: a spec file, inline JSON, or a short name.
    """
    spec = read_json(text)
    if spec is None or isinstance(spec, (int, float)):
        spec = parse_algebra_name(text)
    if isinstance(spec, str):
        spec = parse_algebra_name(spec)
    return algebra_from_spec(spec)


def unitary_from_spec(algebra, spec):
    """
    Unitary matrix of `algebra` described by a unitary spec.

    Raises:
        ValidationError: unknown form, element out of range, or not unitary
    """
    if not isinstance(spec, dict):
        raise ValidationError(f"Invalid unitary spec {spec!r}")
    if 'element' in spec:
        return algebra.canonical_unitary(spec['element']).matrix
    if spec.get('identity'):
        return algebra.identity.copy()
    if spec.get('clock') or spec.get('shift'):
        k = algebra.ambient
        if algebra.dimension != k * k:
            raise ValidationError("Clock and shift unitaries need a full matrix algebra")
        return clock_matrix(k) if spec.get('clock') else shift_matrix(k)
    if 'matrix' in spec:
        m = pairs_to_matrix(spec['matrix'])
        if m.shape != (algebra.ambient, algebra.ambient) or not algebra.contains(m):
            raise ValidationError(f"Matrix is not an element of {algebra.name}")
        if not is_unitary(m):
            raise ValidationError("Matrix is not unitary")
        return m
    raise ValidationError(f"Unknown unitary spec keys {sorted(spec)}")


def resolve_unitary(algebra, text):
    spec = read_json(text)
    if spec is None:
        raise ValidationError(f"Unitary spec must be JSON or a JSON file, got {text!r}")
    return unitary_from_spec(algebra, spec)
