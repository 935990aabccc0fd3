"""
Finite Groups

Multiplication-table groups with the constructors feeding group algebras:
cyclic groups, direct powers, symmetric groups and wreath products
G^k x| S_k, where S_k permutes the coordinates of G^k.
"""
import logging
import math

import numpy as np
from sympy.combinatorics import Permutation, PermutationGroup

import config
from errors import ValidationError, SizeCapError

logger = logging.getLogger(__name__)


def _check_order(what, order):
    cap = config.SIZE_CAP
    if order > cap:
        raise SizeCapError(what, order, cap)


class FiniteGroup:
    """
    A finite group given by its multiplication table.

    Elements are the integers 0..N-1 and table[g, h] is the index of gh.
    """

    def __init__(self, table, name=None, validate=True):
        """
        Initialize the group.

        Args:
            table: N x N array-like of element indices
            name: Optional display name
            validate: Check the group laws
        """
        try:
            table = np.asarray(table, dtype=np.int64)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"Group table must be an integer matrix: {exc}") from exc
        if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
            raise ValidationError(f"Group table must be square and non-empty, got shape {table.shape}")
        order = table.shape[0]
        if table.min() < 0 or table.max() >= order:
            raise ValidationError("Group table entries must be element indices")
        self.table = table
        self.table.setflags(write=False)
        self.name = name or f"G{order}"
        self.identity = self._find_identity()
        self.inverses = self._find_inverses()
        if validate:
            self.validate()

    @property
    def order(self):
        return self.table.shape[0]

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"FiniteGroup({self.name!r}, order={self.order})"

    def multiply(self, g, h):
        return int(self.table[g, h])

    def inverse(self, g):
        return int(self.inverses[g])

    def _find_identity(self):
        ids = np.arange(self.order)
        for e in range(self.order):
            if np.array_equal(self.table[e], ids) and np.array_equal(self.table[:, e], ids):
                return e
        raise ValidationError("Group table has no identity element")

    def _find_inverses(self):
        inverses = np.full(self.order, -1, dtype=np.int64)
        rows, cols = np.nonzero(self.table == self.identity)
        for g, h in zip(rows, cols):
            if inverses[g] == -1:
                inverses[g] = h
        if (inverses < 0).any():
            raise ValidationError("Group table has elements without inverses")
        return inverses

    def validate(self):
        """Check associativity, identity and inverse laws."""
        t = self.table
        ids = np.arange(self.order)
        for row in t:
            if not np.array_equal(np.sort(row), ids):
                raise ValidationError("Group table rows must be permutations (Latin square)")
        if self.order <= config.GROUP_VALIDATION_EXHAUSTIVE_MAX:
            for a in range(self.order):
                # (ab)c == a(bc) for all b, c
                if not np.array_equal(t[t[a]], t[a][t]):
                    raise ValidationError(f"Group table is not associative at element {a}")
        else:
            rng = np.random.default_rng(0)
            a, b, c = rng.integers(0, self.order, size=(3, config.GROUP_VALIDATION_SAMPLES))
            if not np.array_equal(t[t[a, b], c], t[a, t[b, c]]):
                raise ValidationError("Group table is not associative (sampled check)")
        if not np.array_equal(t[ids, self.inverses], np.full(self.order, self.identity)):
            raise ValidationError("Inverse table is inconsistent")

    def is_abelian(self):
        return bool(np.array_equal(self.table, self.table.T))

    def conjugacy_classes(self):
        """Partition of the elements into conjugacy classes, each sorted."""
        seen = np.zeros(self.order, dtype=bool)
        classes = []
        for g in range(self.order):
            if seen[g]:
                continue
            # h g h^-1 for every h
            conj = np.unique(self.table[self.table[:, g], self.inverses])
            seen[conj] = True
            classes.append([int(x) for x in conj])
        return classes

    def left_regular_permutation(self, g):
        """Left translation h -> gh as an index array."""
        return self.table[g].copy()

    def to_permutation_group(self):
        """The left regular representation as a sympy permutation group."""
        return PermutationGroup([Permutation(self.table[g].tolist()) for g in range(self.order)])

    def to_dict(self):
        return {'name': self.name, 'table': self.table.tolist()}


def cyclic_group(n):
    """Z/n."""
    if not isinstance(n, int) or n < 1:
        raise ValidationError(f"Cyclic group order must be a positive integer, got {n!r}")
    _check_order(f"Z{n}", n)
    ids = np.arange(n)
    return FiniteGroup((ids[:, None] + ids[None, :]) % n, name=f"Z{n}")


def symmetric_group(k):
    """
    S_k with elements in lexicographic rank order and (sigma pi)(i) = sigma(pi(i)).
    """
    if not isinstance(k, int) or k < 1:
        raise ValidationError(f"Symmetric group degree must be a positive integer, got {k!r}")
    order = math.factorial(k)
    _check_order(f"S{k}", order)
    perms = np.array([Permutation.unrank_lex(k, r).array_form for r in range(order)], dtype=np.int64)
    index = {tuple(p): r for r, p in enumerate(perms.tolist())}
    table = np.empty((order, order), dtype=np.int64)
    for s in range(order):
        composed = perms[s][perms]  # row p: sigma o pi
        for p in range(order):
            table[s, p] = index[tuple(composed[p])]
    group = FiniteGroup(table, name=f"S{k}")
    group.permutations = perms
    return group


def _power_coordinates(order, k):
    size = order ** k
    return np.array(np.unravel_index(np.arange(size), (order,) * k), dtype=np.int64).T


def direct_power(group, k):
    """
    G^k with componentwise multiplication; coordinates in row-major order.

    Args:
        group: FiniteGroup
        k: Number of factors, k >= 1
    """
    if not isinstance(k, int) or k < 1:
        raise ValidationError(f"Power must be a positive integer, got {k!r}")
    if k == 1:
        return group
    _check_order(f"{group.name}^{k}", group.order ** k)
    coords = _power_coordinates(group.order, k)
    product = group.table[coords[:, None, :], coords[None, :, :]]
    table = np.ravel_multi_index(tuple(np.moveaxis(product, -1, 0)), (group.order,) * k)
    result = FiniteGroup(table, name=f"{group.name}^{k}")
    logger.info("Built %s, order %d", result.name, result.order)
    return result


def wreath(group, k):
    """
    Wreath product G^k x| S_k.

    Element (a; sigma) has index a * k! + rank(sigma), and
    (a; sigma)(b; pi) = (a . sigma(b); sigma pi) with sigma(b)_i = b_{sigma^-1(i)}.
    """
    if not isinstance(k, int) or k < 1:
        raise ValidationError(f"Wreath degree must be a positive integer, got {k!r}")
    order = group.order ** k * math.factorial(k)
    _check_order(f"{group.name} wr S{k}", order)
    if k == 1:
        result = FiniteGroup(group.table, name=f"{group.name} wr S1")
        result.permutation_elements = [result.identity]
        return result

    power = direct_power(group, k)
    sym = symmetric_group(k)
    n_sym = sym.order
    coords = _power_coordinates(group.order, k)
    inverse_perms = np.argsort(sym.permutations, axis=1)
    # act[s, b]: index of sigma_s(b)
    moved = coords[:, inverse_perms].transpose(1, 0, 2)
    act = np.ravel_multi_index(tuple(np.moveaxis(moved, -1, 0)), (group.order,) * k)

    a, s = np.divmod(np.arange(order), n_sym)
    base = power.table[a[:, None], act[s[:, None], a[None, :]]]
    perm = sym.table[s[:, None], s[None, :]]
    table = base * n_sym + perm
    result = FiniteGroup(table, name=f"{group.name} wr S{k}")
    result.base_order = power.order
    # (identity; sigma) for every sigma
    result.permutation_elements = [int(power.identity * n_sym + r) for r in range(n_sym)]
    logger.info("Built %s, order %d", result.name, result.order)
    return result


BUILTIN_GROUPS = {
    'Z2': lambda: cyclic_group(2),
    'Z3': lambda: cyclic_group(3),
    'Z4': lambda: cyclic_group(4),
    'S3': lambda: symmetric_group(3),
}


def named_group(name):
    """Built-in group by name."""
    try:
        factory = BUILTIN_GROUPS[name]
    except KeyError:
        raise ValidationError(
            f"Unknown group {name!r}; available: {', '.join(sorted(BUILTIN_GROUPS))}"
        ) from None
    return factory()
