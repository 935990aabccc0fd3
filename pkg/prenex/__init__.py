"""
Prenex Module

Prenex normal form and quantifier alternation counting.
"""

from .normalizer import (
    PrefixEntry, PrenexFormula, to_prenex, split_prefix, is_prenex,
    standardize_apart, merge_prefixes,
)
from .alternations import (
    Convention, alternation_count, block_structure, prenex_report,
    is_penalty_variable,
)

__all__ = [
    'PrefixEntry', 'PrenexFormula', 'to_prenex', 'split_prefix', 'is_prenex',
    'standardize_apart', 'merge_prefixes', 'Convention', 'alternation_count',
    'block_structure', 'prenex_report', 'is_penalty_variable',
]
