"""
Prenex Normalizer

Rebuilds a formula as a quantifier prefix over a quantifier-free matrix.

Every connective of the grammar is monotone or antitone in each argument, so a
quantifier moves outward unchanged through nondecreasing positions and flips
through nonincreasing ones (the second argument of dot-minus). Bound variables
are first renamed apart, which makes every extraction capture-free.
"""
import logging
from dataclasses import dataclass, field
from typing import NamedTuple, Tuple

from errors import ValidationError
from formulas.syntax import (
    Sort, QuantKind, Sup, Inf, Norm2, Dist2, Const, ApplyModulus, Max, Min,
    Plus, DotMinus, Sqrt, Square, Scale, quantifier, children, with_children,
    polarities, free_variables, all_names, rename_free, is_quantifier_free,
    term_variables, atom_terms,
)

logger = logging.getLogger(__name__)

_CONNECTIVES = (Max, Min, Plus, DotMinus, Sqrt, Square, Scale, ApplyModulus)


class PrefixEntry(NamedTuple):
    kind: QuantKind
    var: str
    sort: Sort


@dataclass(frozen=True)
class PrenexFormula:
    """
    A quantifier prefix over a quantifier-free matrix.

    Attributes:
        prefix: Quantifiers, outermost first
        matrix: Quantifier-free formula
        renaming: (new name, original name) pairs applied before extraction
    """

    prefix: Tuple[PrefixEntry, ...]
    matrix: object
    renaming: Tuple[Tuple[str, str], ...] = field(default=(), compare=False)

    def __post_init__(self):
        prefix = tuple(PrefixEntry(QuantKind(k), v, Sort(s)) for k, v, s in self.prefix)
        object.__setattr__(self, 'prefix', prefix)
        if not is_quantifier_free(self.matrix):
            raise ValidationError("Prenex matrix must be quantifier-free")
        names = [entry.var for entry in prefix]
        if len(set(names)) != len(names):
            raise ValidationError(f"Prefix variables must be distinct: {names}")

    def to_formula(self):
        body = self.matrix
        for entry in reversed(self.prefix):
            body = quantifier(entry.kind, entry.var, entry.sort, body)
        return body

    @property
    def variables(self):
        return tuple(entry.var for entry in self.prefix)

    def original_name(self, name):
        """Name a prefix variable had before renaming."""
        return dict(self.renaming).get(name, name)

    def is_sentence(self):
        return not (free_variables(self.matrix) - set(self.variables))


def split_prefix(formula):
    """
    Peel the leading quantifiers off a formula.

    Returns:
        (list of PrefixEntry, remaining body)
    """
    prefix = []
    node = formula
    while isinstance(node, (Sup, Inf)):
        prefix.append(PrefixEntry(node.kind, node.var, node.sort))
        node = node.body
    return prefix, node


def is_prenex(formula):
    _, body = split_prefix(formula)
    return is_quantifier_free(body)


def _tagged(var, k):
    return f"{var}#{k}"


def standardize_apart(formula):
    """
    Rename bound variables so that every binder has a distinct name, distinct
    from every free variable.

    Traversal is pre-order, left to right, so the result is deterministic.

    Returns:
        (renamed formula, tuple of (new name, original name))
    """
    used = set(free_variables(formula))
    taken = set(all_names(formula))
    renaming = []

    def fresh(var):
        k = 1
        while _tagged(var, k) in taken:
            k += 1
        return _tagged(var, k)

    def walk(node):
        if isinstance(node, (Sup, Inf)):
            var, body = node.var, node.body
            if var in used:
                new = fresh(var)
                taken.add(new)
                body = rename_free(body, var, new)
                renaming.append((new, var))
                var = new
            used.add(var)
            return type(node)(var, node.sort, walk(body))
        kids = children(node)
        if not kids:
            return node
        return with_children(node, [walk(child) for child in kids])

    return walk(formula), tuple(renaming)


def merge_prefixes(prefixes):
    """
    Interleave argument prefixes, keeping each argument's own order.

    The first argument with quantifiers left chooses the next block kind; the
    leading run of that kind is taken from every argument. This never splits
    a block of any argument and adds no block beyond what the arguments force.
    """
    positions = [0] * len(prefixes)
    merged = []
    while True:
        lead = next((i for i, p in enumerate(prefixes) if positions[i] < len(p)), None)
        if lead is None:
            return merged
        kind = prefixes[lead][positions[lead]].kind
        for i, p in enumerate(prefixes):
            while positions[i] < len(p) and p[positions[i]].kind is kind:
                merged.append(p[positions[i]])
                positions[i] += 1


def _matrix_names(node):
    names = frozenset()
    for term in atom_terms(node):
        names |= term_variables(term)
    return names


def _extract(node):
    """Returns (prefix, matrix, free names of matrix)."""
    if isinstance(node, (Norm2, Dist2, Const)):
        return [], node, _matrix_names(node)
    if isinstance(node, (Sup, Inf)):
        prefix, matrix, names = _extract(node.body)
        if node.var not in names:
            logger.debug("Dropping vacuous quantifier over %s", node.var)
            return prefix, matrix, names
        return [PrefixEntry(node.kind, node.var, node.sort)] + prefix, matrix, names
    if not isinstance(node, _CONNECTIVES):
        raise ValidationError(f"Cannot move quantifiers through {type(node).__name__}")

    prefixes, matrices, names = [], [], frozenset()
    for child, polarity in zip(children(node), polarities(node)):
        prefix, matrix, child_names = _extract(child)
        if polarity < 0:
            prefix = [PrefixEntry(e.kind.flipped(), e.var, e.sort) for e in prefix]
        prefixes.append(prefix)
        matrices.append(matrix)
        names |= child_names
    return merge_prefixes(prefixes), with_children(node, matrices), names


def to_prenex(formula):
    """
    Convert a formula to an equivalent prenex formula.

    Args:
        formula: Any well-formed formula

    Returns:
        PrenexFormula with vacuous quantifiers dropped
    """
    standardized, renaming = standardize_apart(formula)
    prefix, matrix, _ = _extract(standardized)
    return PrenexFormula(tuple(prefix), matrix, renaming)
