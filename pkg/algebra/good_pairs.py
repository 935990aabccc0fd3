"""
Good Pair Verification

A pair of unitaries (u1, u2) is good when every element x satisfies
||x - E(x)||_2^p <= c (||[x,u1]||_2^p + ||[x,u2]||_2^p), E the conditional
expectation onto C(u1, u2). The best constant is a ratio minimized over the
orthogonal complement of C(u1, u2); for p = 2 it is an exact eigenvalue.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize

import config
from errors import ValidationError
from .tracial import is_unitary, _as_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GoodPairReport:
    """
    Outcome of a good-pair check.

    Attributes:
        residual: lambda, the smallest ratio c * sum ||[x,u_i]||^p / ||x - E x||^p
        good: residual >= 1
        vacuous: C(u1, u2) is the whole algebra
        exact: residual computed by an eigenvalue problem (p = 2)
    """

    residual: float
    good: bool
    vacuous: bool
    exact: bool
    exponent: float
    constant: float
    commutant_dimension: int
    algebra_dimension: int
    u1: np.ndarray = field(repr=False, compare=False)
    u2: np.ndarray = field(repr=False, compare=False)

    def to_dict(self):
        from .specs import matrix_to_pairs

        return {
            'residual': None if math.isinf(self.residual) else self.residual,
            'good': self.good,
            'vacuous': self.vacuous,
            'exact': self.exact,
            'exponent': self.exponent,
            'constant': self.constant,
            'commutant_dimension': self.commutant_dimension,
            'algebra_dimension': self.algebra_dimension,
            'u1': matrix_to_pairs(self.u1),
            'u2': matrix_to_pairs(self.u2),
        }


def _ad_matrix(algebra, u):
    """Matrix of x -> [x, u] from basis coordinates to the trace-isometric embedding."""
    return np.stack([algebra.embed(b @ u - u @ b) for b in algebra.basis], axis=1)


def _numeric_residual(ads, complement, p, c):
    """Minimize the degree-0 ratio over the complement by restarts from its eigenvectors."""
    k = complement.shape[1]

    def ratio(params):
        z = complement @ (params[:k] + 1j * params[k:])
        norm = np.linalg.norm(z)
        if norm < 1e-12:
            return np.inf
        return c * sum(np.linalg.norm(ad @ z) ** p for ad in ads) / norm ** p

    best = np.inf
    for j in range(min(k, config.GOOD_PAIR_NUMERIC_STARTS)):
        start = np.zeros(2 * k)
        start[j] = 1.0
        result = optimize.minimize(ratio, start, method='Nelder-Mead',
                                   options={'maxfev': 400 * k, 'xatol': 1e-10, 'fatol': 1e-12})
        best = min(best, float(result.fun), float(ratio(start)))
    return best


def is_good_pair(algebra, u1, u2, p=None, c=None):
    """
    Check whether (u1, u2) is a good pair of unitaries.

    Args:
        algebra: TracialAlgebra
        u1, u2: Unitaries of the algebra (matrices or AlgElements)
        p: Exponent, default 2
        c: Constant, default 100

    Returns:
        GoodPairReport
    """
    p = config.GOOD_PAIR_EXPONENT if p is None else float(p)
    c = config.GOOD_PAIR_CONSTANT if c is None else float(c)
    if not p > 0 or not c > 0:
        raise ValidationError(f"Residual exponent and constant must be positive, got p={p}, c={c}")
    mats = []
    for label, u in (('u1', u1), ('u2', u2)):
        m = _as_matrix(u)
        if m.shape != (algebra.ambient, algebra.ambient) or not algebra.contains(m):
            raise ValidationError(f"{label} is not an element of {algebra.name}")
        if not is_unitary(m):
            raise ValidationError(f"{label} is not unitary")
        mats.append(m)

    ads = [_ad_matrix(algebra, m) for m in mats]
    n = algebra.dimension
    # x -> [x, u] kills exactly C(u1, u2); unitaries commute with x iff their adjoints do
    kernel_dim = linalg.null_space(np.vstack(ads), rcond=config.RANK_TOL).shape[1]
    gram = sum(ad.conj().T @ ad for ad in ads)
    eigvals, eigvecs = np.linalg.eigh(gram)

    if kernel_dim >= n:
        residual, exact = math.inf, True
    elif p == 2:
        residual, exact = c * max(float(eigvals[kernel_dim]), 0.0), True
    else:
        residual, exact = _numeric_residual(ads, eigvecs[:, kernel_dim:], p, c), False

    report = GoodPairReport(
        residual=residual,
        good=residual >= 1,
        vacuous=kernel_dim >= n,
        exact=exact,
        exponent=p,
        constant=c,
        commutant_dimension=int(kernel_dim),
        algebra_dimension=n,
        u1=mats[0],
        u2=mats[1],
    )
    logger.info("Good pair check on %s: lambda=%s, commutant dimension %d",
                algebra.name, report.residual, kernel_dim)
    return report
