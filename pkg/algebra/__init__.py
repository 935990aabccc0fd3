"""
Algebra Module

Finite groups, exact finite-dimensional tracial *-algebras and good-pair
verification.
"""

from .groups import (
    FiniteGroup, cyclic_group, symmetric_group, direct_power, wreath, named_group,
)
from .tracial import (
    TracialAlgebra, AlgElement, matrix_algebra, group_algebra, tensor, direct_sum,
    generated_subalgebra, commutant, center, relative_commutant,
    conditional_expectation, distance_to, clip_to_ball, is_unitary, operator_norm,
    clock_matrix, shift_matrix,
)
from .good_pairs import GoodPairReport, is_good_pair
from .specs import (
    algebra_from_spec, resolve_algebra, resolve_unitary, unitary_from_spec,
    group_from_spec, matrix_to_pairs, pairs_to_matrix,
)

__all__ = [
    'FiniteGroup', 'cyclic_group', 'symmetric_group', 'direct_power', 'wreath',
    'named_group', 'TracialAlgebra', 'AlgElement', 'matrix_algebra', 'group_algebra',
    'tensor', 'direct_sum', 'generated_subalgebra', 'commutant', 'center',
    'relative_commutant', 'conditional_expectation', 'distance_to', 'clip_to_ball',
    'is_unitary', 'operator_norm', 'clock_matrix', 'shift_matrix', 'GoodPairReport',
    'is_good_pair', 'algebra_from_spec', 'resolve_algebra', 'resolve_unitary',
    'unitary_from_spec', 'group_from_spec', 'matrix_to_pairs', 'pairs_to_matrix',
]
