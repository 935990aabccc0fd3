"""
Quantifier Alternations

Block structure of a quantifier prefix and the alternation count, either as
the number of maximal same-kind blocks or as the number of kind switches.
"""
from enum import Enum

from errors import ValidationError
from formulas.syntax import formula_size
from .normalizer import PrenexFormula, split_prefix, is_prenex


class Convention(str, Enum):
    BLOCKS = 'blocks'
    SWITCHES = 'switches'


def _as_prenex(formula):
    if isinstance(formula, PrenexFormula):
        return formula
    if not is_prenex(formula):
        raise ValidationError("Alternations are counted on prenex formulas; normalize first")
    prefix, matrix = split_prefix(formula)
    return PrenexFormula(tuple(prefix), matrix)


def is_penalty_variable(name):
    """Variables introduced by relativization penalties carry a prime."""
    return "'" in name


def block_structure(prefix, keep=None):
    """
    Maximal same-kind runs of a prefix.

    Args:
        prefix: Sequence of PrefixEntry
        keep: Optional predicate on variable names; other entries are ignored

    Returns:
        List of (kind, number of variables)
    """
    blocks = []
    for entry in prefix:
        if keep is not None and not keep(entry.var):
            continue
        if blocks and blocks[-1][0] is entry.kind:
            blocks[-1] = (entry.kind, blocks[-1][1] + 1)
        else:
            blocks.append((entry.kind, 1))
    return blocks


def alternation_count(formula, convention=Convention.BLOCKS):
    """
    Count quantifier alternations of a prenex formula.

    Args:
        formula: PrenexFormula, or a Formula already in prenex form
        convention: 'blocks' (maximal runs) or 'switches' (blocks - 1)

    Returns:
        Nonnegative integer
    """
    prenex = _as_prenex(formula)
    blocks = len(block_structure(prenex.prefix))
    if Convention(convention) is Convention.BLOCKS:
        return blocks
    return max(blocks - 1, 0)


def _penalty_summary(prefix):
    """Penalty variables and the maximal blocks made of them alone."""
    runs = []
    for entry in prefix:
        penalty = is_penalty_variable(entry.var)
        if runs and runs[-1][0] is entry.kind:
            runs[-1][1].append(penalty)
        else:
            runs.append((entry.kind, [penalty]))
    trailing = 0
    for _, flags in reversed(runs):
        if not all(flags):
            break
        trailing += 1
    return {
        'penalty_variables': sum(is_penalty_variable(e.var) for e in prefix),
        'penalty_blocks': sum(all(flags) for _, flags in runs),
        'trailing_penalty_blocks': trailing,
        'blocks_without_penalties': len(block_structure(prefix, keep=lambda v: not is_penalty_variable(v))),
    }


def prenex_report(formula):
    """
    JSON-ready summary: prefix, block counts and matrix size.

    The 'penalty' entry counts blocks made only of relativization penalty
    variables; relativizing a sentence adds exactly one, at the end.
    """
    prenex = _as_prenex(formula)
    structure = block_structure(prenex.prefix)
    return {
        'prefix': [
            {'kind': e.kind.value, 'var': e.var, 'sort': e.sort.value}
            for e in prenex.prefix
        ],
        'blocks': len(structure),
        'switches': max(len(structure) - 1, 0),
        'block_structure': [[kind.value, count] for kind, count in structure],
        'begins_with': prenex.prefix[0].kind.value if prenex.prefix else None,
        'matrix_size': formula_size(prenex.matrix),
        'penalty': _penalty_summary(prenex.prefix),
    }
