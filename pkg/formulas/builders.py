"""
Sentence Builders

Constructors for the named formulas: the commutation penalty chi, the
sentences psi_m and tau_m, the good-pair and domination formulas, and the
inductive family theta_n.
"""
import math
from dataclasses import dataclass

from errors import ValidationError
from .syntax import (
    Var, Adjoint, Norm2, Dist2, Max, Plus, DotMinus, Sqrt, Square, Scale,
    Sup, Inf, Sort, QuantKind, commutator, conjugate, require_distinct,
    is_sentence,
)


def _positive_int(value, name):
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ValidationError(f"{name} must be a positive integer, got {value!r}")
    return value


def build_chi(X='X', U1='U1', U2='U2'):
    """
    chi(X, U1, U2) = 100 (||[X,U1]||_2^2 + ||[X,U2]||_2^2).

    Args:
        X: Name of the tested element
        U1, U2: Names of the unitary pair

    Returns:
        Quantifier-free formula with free variables {X, U1, U2}
    """
    require_distinct(X, U1, U2)
    x = Var(X)
    return Scale(100, Plus(
        Square(Norm2(commutator(x, Var(U1)))),
        Square(Norm2(commutator(x, Var(U2)))),
    ))


def build_psi_m(m, Va='Va', Vb='Vb'):
    """
    psi_m(Va, Vb): sup over X_1..X_m, Y_1..Y_m of
    (inf_U max_ij ||[U X_i U*, Y_j]||_2) dotminus 2 max_i sqrt(chi(X_i, Va, Vb)).
    """
    m = _positive_int(m, 'm')
    xs = [f"X{i}" for i in range(1, m + 1)]
    ys = [f"Y{j}" for j in range(1, m + 1)]
    require_distinct(Va, Vb, 'U', *xs, *ys)

    u = Var('U')
    spread = Max(tuple(
        Norm2(commutator(conjugate(u, Var(x)), Var(y)))
        for x in xs for y in ys
    ))
    penalty = Scale(2, Max(tuple(Sqrt(build_chi(x, Va, Vb)) for x in xs)))
    body = DotMinus(Inf('U', Sort.UNITARY, spread), penalty)
    for name in reversed(xs + ys):
        body = Sup(name, Sort.BALL, body)
    return body


def build_tau_m(m):
    """tau_m = inf_{Va, Vb} psi_m(Va, Vb), a sentence."""
    psi = build_psi_m(m)
    return Inf('Va', Sort.UNITARY, Inf('Vb', Sort.UNITARY, psi))


def build_phi_good(U1='U1', U2='U2', X='X', Y='Y'):
    """
    phi_good(U1, U2) = sup_X inf_Y max(max_i ||[Y,U_i]||_2, d(X,Y) dotminus sqrt(chi(X,U1,U2))).

    Vanishes in saturated factors exactly at good pairs.
    """
    require_distinct(U1, U2, X, Y)
    y = Var(Y)
    matrix = Max((
        Max((Norm2(commutator(y, Var(U1))), Norm2(commutator(y, Var(U2))))),
        DotMinus(Dist2(Var(X), y), Sqrt(build_chi(X, U1, U2))),
    ))
    return Sup(X, Sort.BALL, Inf(Y, Sort.BALL, matrix))


def build_phi_leq(n, Yvars, Uvars, X='X'):
    """
    phi_leq(Y; U): sup over X in C(U) of max_i ||[X, Y_i]||_2.

    The constrained quantifier is expressed through the hat transform.

    Args:
        n: Number of Y variables
        Yvars: Names Y_1..Y_n
        Uvars: Pair of unitary names
        X: Name of the bound variable
    """
    from .transforms import hat_transform

    n = _positive_int(n, 'n')
    Yvars = tuple(Yvars)
    Uvars = tuple(Uvars)
    if len(Yvars) != n:
        raise ValidationError(f"phi_leq expects {n} Y variables, got {len(Yvars)}")
    if len(Uvars) != 2:
        raise ValidationError(f"phi_leq expects a pair of unitaries, got {len(Uvars)}")
    require_distinct(X, *Yvars, *Uvars)
    x = Var(X)
    inner = Max(tuple(Norm2(commutator(x, Var(y))) for y in Yvars))
    return hat_transform(inner, X, Uvars, QuantKind.SUP)


def level_names(level):
    """Variable names introduced at one level of the theta recursion."""
    return {
        'U1': (f"U1a.{level}", f"U1b.{level}"),
        'U2': (f"U2a.{level}", f"U2b.{level}"),
        'A': f"A.{level}",
        'good1': (f"Xg1.{level}", f"Yg1.{level}"),
        'good2': (f"Xg2.{level}", f"Yg2.{level}"),
        'leq': f"Xl.{level}",
    }


def build_theta(theta, n):
    """
    theta_1 = theta; theta_{k+1} =
    inf_U1 max(phi_good(U1), sup_A inf_U2 max(phi_good(U2), phi_leq(A, U1; U2), relativized theta_k)).

    Args:
        theta: A sentence
        n: Level, n >= 1

    Returns:
        The sentence theta_n, with level-indexed variable names
    """
    from .transforms import relativize
    from prenex import to_prenex

    n = _positive_int(n, 'n')
    if not is_sentence(theta):
        raise ValidationError("build_theta needs a sentence")

    current = theta
    for level in range(2, n + 1):
        names = level_names(level)
        u1, u2, a = names['U1'], names['U2'], names['A']
        relativized = relativize(to_prenex(current).to_formula(), u1, u2)
        inner = Max((
            build_phi_good(*u2, *names['good2']),
            build_phi_leq(3, (a,) + u1, u2, X=names['leq']),
            relativized,
        ))
        inner = Inf(u2[0], Sort.UNITARY, Inf(u2[1], Sort.UNITARY, inner))
        body = Max((build_phi_good(*u1, *names['good1']), Sup(a, Sort.BALL, inner)))
        current = Inf(u1[0], Sort.UNITARY, Inf(u1[1], Sort.UNITARY, body))
    return current


def compute_delta(C, m, upsilon):
    """
    delta = sqrt(upsilon(1 / (2 C m)) / (200 * 30**2)).

    Args:
        C: Positive constant
        m: Tuple length, m >= 1
        upsilon: Caller-supplied monotone function with upsilon(t) > 0 for t > 0
    """
    m = _positive_int(m, 'm')
    try:
        C = float(C)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"C must be a positive real, got {C!r}") from exc
    if not C > 0:
        raise ValidationError(f"C must be a positive real, got {C!r}")
    if math.isinf(C):
        return 0.0
    value = float(upsilon(1.0 / (2.0 * C * m)))
    if not value >= 0:
        raise ValidationError(f"upsilon must be nonnegative, got {value!r}")
    return math.sqrt(value / (200.0 * 30 ** 2))


@dataclass(frozen=True)
class SentenceSpec:
    """Identifies theta_{m,n}: tuple length m, induction level n."""

    m: int
    n: int

    def __post_init__(self):
        _positive_int(self.m, 'm')
        _positive_int(self.n, 'n')

    def build(self):
        return build_theta(build_tau_m(self.m), self.n)
