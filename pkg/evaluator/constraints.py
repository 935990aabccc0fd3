"""
Commutation Penalties

A penalty is the body of a modulus application or the subtracted side of a
dot-minus. A variable appearing in two or more commutator atoms ||[X, W]||_2
of the same penalty is asked to commute with the other names W of those
atoms. The optimizer searches such variables inside the exact commutant of
their partners' values as well as in the whole algebra.
"""
from collections import defaultdict
from dataclasses import dataclass
from typing import FrozenSet, Tuple

from formulas.syntax import (
    Var, Norm2, ApplyModulus, DotMinus, as_commutator, children, bound_variables,
)


def _commutator_names(node):
    if not isinstance(node, Norm2):
        return None
    pair = as_commutator(node.term)
    if pair is None or not all(isinstance(t, Var) for t in pair):
        return None
    a, b = pair[0].name, pair[1].name
    return (a, b) if a != b else None


def penalty_partners(formula):
    """
    Commutation partners of the variables penalized in a formula.

    Returns:
        Dict mapping a name to the frozenset of names it should commute with
    """
    partners = defaultdict(set)
    # (node, index of the penalty context it belongs to, or None)
    contexts = []
    stack = [(formula, None)]
    while stack:
        node, context = stack.pop()
        if isinstance(node, ApplyModulus):
            contexts.append([])
            stack.append((node.body, len(contexts) - 1))
            continue
        if isinstance(node, DotMinus):
            stack.append((node.left, context))
            contexts.append([])
            stack.append((node.right, len(contexts) - 1))
            continue
        names = _commutator_names(node)
        if names is not None:
            if context is not None:
                contexts[context].append(names)
            continue
        stack.extend((child, context) for child in children(node))

    for atoms in contexts:
        counts = defaultdict(int)
        for a, b in atoms:
            counts[a] += 1
            counts[b] += 1
        for a, b in atoms:
            if counts[a] >= 2:
                partners[a].add(b)
            if counts[b] >= 2:
                partners[b].add(a)
    return {name: frozenset(names) for name, names in partners.items()}


@dataclass(frozen=True)
class BlockConstraint:
    """
    Commutation constraint of one block variable.

    Attributes:
        var: The block variable
        outer: Partners whose values are fixed when the block runs
        inner: (name, outer partners) for partners bound inside the block's
            body; the variable should commute with their whole range
    """

    var: str
    outer: FrozenSet[str]
    inner: Tuple[Tuple[str, FrozenSet[str]], ...]


def block_constraints(variables, body, partners):
    """
    Constraints of the variables of a quantifier block.

    Args:
        variables: [(name, sort)] of the block
        body: Formula under the block
        partners: Result of penalty_partners for the whole formula

    Returns:
        Dict name -> BlockConstraint, for constrained variables only
    """
    block = {name for name, _ in variables}
    inside = bound_variables(body)

    def fixed(names):
        return frozenset(w for w in names if w not in block and w not in inside)

    constraints = {}
    for name, _ in variables:
        mine = partners.get(name, frozenset())
        inner = []
        for w in sorted(mine & inside):
            theirs = fixed(partners.get(w, frozenset()))
            if theirs:
                inner.append((w, theirs))
        outer = fixed(mine)
        if outer or inner:
            constraints[name] = BlockConstraint(name, outer, tuple(inner))
    return constraints
