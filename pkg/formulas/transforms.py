"""
Constrained Quantification Transforms

Quantifiers over the commutant C(U) of a good pair, and over the relative
commutant C(U2)' n C(U1) of nested good pairs, expressed with ordinary
quantifiers plus a distance penalty. Relativization applies the second
transform to every quantifier of a prenex sentence.
"""
import config
from errors import ValidationError
from .builders import build_chi
from .modulus import occurrence_modulus
from .syntax import (
    Var, Norm2, Const, Plus, DotMinus, Sqrt, Scale, ApplyModulus, Sort,
    QuantKind, commutator, quantifier, bound_variables, all_names,
    require_distinct, rename_free, fresh_name, is_sentence,
)


def _pair(names, label):
    names = tuple(names)
    if len(names) != 2:
        raise ValidationError(f"{label} must be a pair of variable names, got {names!r}")
    return names


def _penalized(kind, var, sort, body, penalty):
    """inf_X (body + alpha(p)) or sup_X (body dotminus alpha(p)), alpha the modulus of body in X."""
    kind = QuantKind(kind)
    sort = Sort(sort)
    if var in bound_variables(body):
        raise ValidationError(f"Variable {var!r} is bound in the formula")
    alpha = occurrence_modulus(body, var)
    if sort is Sort.UNITARY:
        penalty = Scale(config.UNITARY_PENALTY_FACTOR, penalty)
    charge = ApplyModulus(alpha, penalty)
    if kind is QuantKind.INF:
        return quantifier(kind, var, sort, Plus(body, charge))
    return quantifier(kind, var, sort, DotMinus(body, charge))


def hat_transform(psi, X, Upair, mode, sort=Sort.BALL):
    """
    Quantify X over the commutant of a good pair.

    Args:
        psi: Formula in X
        X: Variable to quantify
        Upair: Names of the good pair (U1, U2)
        mode: QuantKind.SUP or QuantKind.INF (or 'sup' / 'inf')
        sort: Sort of X

    Returns:
        inf_X (psi + alpha(sqrt(chi(X,U1,U2)))) for inf, and
        sup_X (psi dotminus alpha(sqrt(chi(X,U1,U2)))) for sup
    """
    u1, u2 = _pair(Upair, 'Upair')
    require_distinct(X, u1, u2)
    if u1 in bound_variables(psi) or u2 in bound_variables(psi):
        raise ValidationError(f"Unitary names {Upair!r} are bound in the formula")
    return _penalized(mode, X, sort, psi, Sqrt(build_chi(X, u1, u2)))


def build_zeta(X, U1pair, U2pair, Y=None, literal=False):
    """
    Distance bound to the relative commutant C(U2)' n C(U1).

    zeta = sqrt(chi(X, U1)) + sqrt(hat_sup over Y of psi(X, Y, U2)) where
    psi = 2 sqrt(chi(X, U1)) + ||[X, Y]||_2. With literal=True, psi is
    2 chi(X, U2) + ||XY - YX||_2 instead.

    Args:
        X: Element variable
        U1pair, U2pair: Names of the two good pairs
        Y: Name for the inner bound variable, defaults to X'
        literal: Emit the alternative inner formula
    """
    u1 = _pair(U1pair, 'U1pair')
    u2 = _pair(U2pair, 'U2pair')
    Y = Y or f"{X}'"
    require_distinct(X, Y, *u1, *u2)
    x, y = Var(X), Var(Y)
    if literal:
        psi = Plus(Scale(2, build_chi(X, *u2)), Norm2(commutator(x, y)))
    else:
        psi = Plus(Scale(2, Sqrt(build_chi(X, *u1))), Norm2(commutator(x, y)))
    psi_hat = hat_transform(psi, Y, u2, QuantKind.SUP)
    return Plus(Sqrt(build_chi(X, *u1)), Sqrt(psi_hat))


def bar_transform(rho, X, U1pair, U2pair, mode, sort=Sort.BALL, penalty_var=None):
    """
    Quantify X over the relative commutant of nested good pairs.

    Same shape as hat_transform with zeta in place of sqrt(chi).

    Args:
        rho: Formula in X
        X: Variable to quantify
        U1pair, U2pair: Names of the good pairs, C(U2) inside C(U1)
        mode: QuantKind.SUP or QuantKind.INF
        sort: Sort of X
        penalty_var: Name of zeta's inner variable, defaults to X'
    """
    u1 = _pair(U1pair, 'U1pair')
    u2 = _pair(U2pair, 'U2pair')
    names = all_names(rho)
    penalty_var = penalty_var or fresh_name(f"{X}'", names | {X, *u1, *u2})
    if penalty_var in names:
        raise ValidationError(f"Penalty variable {penalty_var!r} already occurs in the formula")
    if any(u in bound_variables(rho) for u in u1 + u2):
        raise ValidationError("Unitary pair names are bound in the formula")
    zeta = build_zeta(X, u1, u2, Y=penalty_var)
    return _penalized(mode, X, sort, rho, zeta)


def relativize(theta, U1pair, U2pair):
    """
    Relativize a prenex sentence to C(U2)' n C(U1).

    Every quantifier, innermost first, is replaced by its bar transform.
    Bound variables clashing with the unitary names are renamed first.

    Args:
        theta: Sentence in prenex normal form
        U1pair, U2pair: Names of the nested good pairs

    Returns:
        Prenex formula with free variables among the four unitary names
    """
    from prenex import is_prenex, split_prefix, to_prenex

    u1 = _pair(U1pair, 'U1pair')
    u2 = _pair(U2pair, 'U2pair')
    require_distinct(*u1, *u2)
    if not is_prenex(theta):
        raise ValidationError("relativize needs a formula in prenex normal form")
    if not is_sentence(theta):
        raise ValidationError("relativize needs a sentence")
    if isinstance(theta, Const):
        return theta

    prefix, matrix = split_prefix(theta)
    taken = set(all_names(theta)) | set(u1) | set(u2)
    renamed = []
    for kind, var, sort in prefix:
        if var in u1 or var in u2:
            new = fresh_name(var, taken)
            taken.add(new)
            matrix = rename_free(matrix, var, new)
            var = new
        renamed.append((kind, var, sort))

    body = matrix
    for kind, var, sort in reversed(renamed):
        penalty_var = fresh_name(f"{var}'", taken)
        taken.add(penalty_var)
        body = bar_transform(body, var, u1, u2, kind, sort, penalty_var=penalty_var)
    return to_prenex(body).to_formula()
