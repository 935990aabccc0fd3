"""
Finite-Dimensional Tracial *-Algebras

An algebra is a *-subalgebra of the D x D complex matrices together with a
positive density rho commuting with it; the trace is tau(x) = tr(rho x).
Elements are stored as matrices, and the algebra as a basis orthonormal for
<a, b> = tau(a* b). Commutants, generated subalgebras and conditional
expectations reduce to null spaces and orthogonal projections.
"""
import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import linalg

import config
from errors import ValidationError, SizeCapError, NumericalError

logger = logging.getLogger(__name__)


def _check_ambient(what, ambient):
    if ambient > config.SIZE_CAP:
        raise SizeCapError(what, ambient, config.SIZE_CAP)


def _as_matrix(x):
    if isinstance(x, AlgElement):
        return x.matrix
    return np.asarray(x, dtype=complex)


def clip_to_ball(x):
    """Project onto the operator-norm unit ball by clipping singular values at 1."""
    u, s, vh = np.linalg.svd(x)
    if s[0] <= 1.0:
        return x
    return (u * np.minimum(s, 1.0)) @ vh


def operator_norm(x):
    return float(np.linalg.norm(_as_matrix(x), 2))


def is_unitary(x, tol=None):
    tol = config.UNITARY_TOL if tol is None else tol
    m = _as_matrix(x)
    eye = np.eye(m.shape[0])
    return bool(np.abs(m.conj().T @ m - eye).max() <= tol and np.abs(m @ m.conj().T - eye).max() <= tol)


def clock_matrix(k):
    """diag(1, w, ..., w^(k-1)) with w = exp(2 pi i / k)."""
    return np.diag(np.exp(2j * np.pi * np.arange(k) / k))


def shift_matrix(k):
    """Cyclic shift e_j -> e_(j+1 mod k)."""
    return np.roll(np.eye(k, dtype=complex), 1, axis=0)


class TracialAlgebra:
    """
    A finite-dimensional *-algebra with a faithful normalized trace.

    Attributes:
        basis: (n, D, D) array, orthonormal for tau(a* b)
        rho: (D, D) positive density with tr(rho) = 1
        name: Display name
        group: FiniteGroup for group algebras, else None
        spec: Canonical spec dict when built from a spec
    """

    def __init__(self, basis, rho, name='A', group=None, validate=True):
        basis = np.asarray(basis, dtype=complex)
        rho = np.asarray(rho, dtype=complex)
        if basis.ndim != 3 or basis.shape[1] != basis.shape[2] or rho.shape != basis.shape[1:]:
            raise ValidationError(f"Basis must be (n, D, D) with a matching density, got {basis.shape}")
        self.basis = basis
        self.rho = rho
        self.name = name
        self.group = group
        self.spec = None
        self._flat_conj = basis.reshape(basis.shape[0], -1).conj()
        if validate:
            self.validate()
        logger.debug("Algebra %s: dimension %d, ambient %d", name, self.dimension, self.ambient)

    def __repr__(self):
        return f"TracialAlgebra({self.name!r}, dim={self.dimension}, ambient={self.ambient})"

    @property
    def dimension(self):
        return self.basis.shape[0]

    @property
    def ambient(self):
        return self.basis.shape[1]

    @cached_property
    def identity(self):
        return np.eye(self.ambient, dtype=complex)

    @cached_property
    def rho_sqrt(self):
        w, v = np.linalg.eigh(self.rho)
        return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T

    @cached_property
    def rho_isqrt(self):
        w, v = np.linalg.eigh(self.rho)
        return (v / np.sqrt(w)) @ v.conj().T

    # -- trace geometry ----------------------------------------------------

    def trace(self, x):
        return complex(np.trace(self.rho @ _as_matrix(x)))

    def inner(self, a, b):
        """tau(a* b)."""
        return complex(np.vdot((_as_matrix(a) @ self.rho_sqrt).ravel(), (_as_matrix(b) @ self.rho_sqrt).ravel()))

    def norm2(self, x):
        """||x||_2 = tau(x* x)^(1/2)."""
        return float(np.linalg.norm(_as_matrix(x) @ self.rho_sqrt))

    def embed(self, x):
        """Isometry onto C^(D^2) for the trace inner product."""
        return (_as_matrix(x) @ self.rho_sqrt).ravel()

    def coordinates(self, x):
        return self._flat_conj @ (_as_matrix(x) @ self.rho).ravel()

    def from_coordinates(self, coords):
        return np.tensordot(np.asarray(coords, dtype=complex), self.basis, axes=1)

    def project(self, x):
        """Trace-orthogonal projection onto the algebra."""
        return self.from_coordinates(self.coordinates(x))

    def contains(self, x, tol=None):
        tol = config.MEMBERSHIP_TOL if tol is None else tol
        m = _as_matrix(x)
        if m.shape != (self.ambient, self.ambient):
            return False
        return bool(np.linalg.norm(m - self.project(m)) <= tol * max(1.0, np.linalg.norm(m)))

    def element(self, x):
        """Wrap a matrix of the algebra as an AlgElement."""
        m = _as_matrix(x)
        if not self.contains(m):
            raise ValidationError(f"Matrix is not an element of {self.name}")
        return AlgElement(self, m)

    # -- structure ---------------------------------------------------------

    def validate(self):
        """Check orthonormality, unit, closure under * and products, traciality."""
        n = self.dimension
        if n == 0:
            raise NumericalError("Algebra basis is empty")
        if not np.allclose(self.rho, self.rho.conj().T, atol=1e-12):
            raise NumericalError("Density is not self-adjoint")
        if np.linalg.eigvalsh(self.rho).min() <= 0:
            raise NumericalError("Density is not positive definite, the trace is not faithful")
        if abs(np.trace(self.rho) - 1) > 1e-10:
            raise NumericalError("Trace is not normalized")
        gram = self._flat_conj @ (self.basis @ self.rho).reshape(n, -1).T
        if not np.allclose(gram, np.eye(n), atol=1e-9):
            raise NumericalError("Basis is not orthonormal for the trace")
        if not self.contains(self.identity):
            raise NumericalError(f"{self.name} does not contain the unit")

        tol = config.CLOSURE_TOL
        for b in self.basis:
            if not self.contains(b.conj().T, tol) or not self.contains(b, tol):
                raise NumericalError(f"{self.name} is not closed under adjoint")
            if not np.allclose(b @ self.rho, self.rho @ b, atol=1e-10):
                raise NumericalError("Density does not commute with the algebra")
        if n <= config.CLOSURE_EXHAUSTIVE_MAX:
            pairs = [(i, j) for i in range(n) for j in range(n)]
        else:
            rng = np.random.default_rng(0)
            pairs = [tuple(p) for p in rng.integers(0, n, size=(256, 2))]
        for i, j in pairs:
            if not self.contains(self.basis[i] @ self.basis[j], 1e-9):
                raise NumericalError(f"{self.name} is not closed under multiplication")

    def is_abelian(self):
        b = self.basis
        for i in range(self.dimension):
            for j in range(i + 1, self.dimension):
                if not np.allclose(b[i] @ b[j], b[j] @ b[i], atol=1e-10):
                    return False
        return True

    def is_subalgebra_of(self, other):
        if self.ambient != other.ambient or not np.allclose(self.rho, other.rho, atol=1e-12):
            return False
        if not self.contains(self.identity):
            return False
        return all(other.contains(b) for b in self.basis)

    def _real_orth(self, herm):
        """Real orthonormal basis, for tau(ab), of the span of self-adjoint matrices."""
        vecs = np.stack([self.embed(h) for h in herm], axis=1)
        real = np.vstack([vecs.real, vecs.imag])
        q = linalg.orth(real, rcond=config.RANK_TOL)
        half = q.shape[0] // 2
        mats = (q[:half] + 1j * q[half:]).T.reshape(-1, self.ambient, self.ambient) @ self.rho_isqrt
        return (mats + np.conj(np.transpose(mats, (0, 2, 1)))) / 2

    @cached_property
    def self_adjoint_basis(self):
        """Real basis of the self-adjoint part, orthonormal for tau(ab)."""
        herm = []
        for b in self.basis:
            herm.append((b + b.conj().T) / 2)
            herm.append((b - b.conj().T) / 2j)
        mats = self._real_orth(herm)
        if mats.shape[0] != self.dimension:
            raise NumericalError(
                f"Self-adjoint part has real dimension {mats.shape[0]}, expected {self.dimension}"
            )
        return mats

    @cached_property
    def reference_unitaries(self):
        """
        Non-trivial unitaries of the algebra used as structured search starts.

        Group algebras give u_g for g != e. Other algebras give sign(h) for
        each h of a trace-orthonormal basis of the traceless self-adjoint
        part; for M_k these are pairwise orthogonal reflections.
        """
        identity = self.identity
        if self.group is not None:
            return [b for b in self.basis if not np.allclose(b, identity)]
        if self.dimension == 1:
            return []
        traceless = [h - self.trace(h).real * identity for h in self.self_adjoint_basis]
        unitaries = []
        for h in self._real_orth(traceless):
            w, v = np.linalg.eigh(h)
            signs = np.where(w > -config.RANK_TOL, 1.0, -1.0)
            unitaries.append((v * signs) @ v.conj().T)
        return unitaries

    # -- real parametrizations --------------------------------------------

    def real_coordinates(self, x):
        """Coordinates (a, b) with x = sum (a_j + i b_j) h_j."""
        h = self.self_adjoint_basis
        c = np.array([self.inner(hj, x) for hj in h])
        return np.concatenate([c.real, c.imag])

    def from_real(self, params):
        """Element sum (a_j + i b_j) h_j, for params = (a, b)."""
        n = self.dimension
        params = np.asarray(params, dtype=float)
        return np.tensordot(params[:n] + 1j * params[n:], self.self_adjoint_basis, axes=1)

    def ball_point(self, params):
        """Element of the unit ball for 2n real parameters."""
        return clip_to_ball(self.from_real(params))

    def unitary_point(self, params):
        """Unitary exp(i h) for the self-adjoint h with n real coordinates."""
        h = np.tensordot(np.asarray(params, dtype=float), self.self_adjoint_basis, axes=1)
        return linalg.expm(1j * h)

    def unitary_parameters(self, u):
        """Coordinates of a self-adjoint h with exp(i h) = u, eigenphases in (-pi, pi]."""
        u = _as_matrix(u)
        t, z = linalg.schur(u, output='complex')
        h = (z * np.angle(np.diag(t))) @ z.conj().T
        h = (h + h.conj().T) / 2
        return np.array([self.inner(hj, h).real for hj in self.self_adjoint_basis])

    def random_element(self, rng, ball=True):
        x = self.from_real(rng.standard_normal(2 * self.dimension))
        if not ball:
            return x
        return x / max(1.0, operator_norm(x))

    def random_unitary(self, rng):
        return self.unitary_point(rng.uniform(-np.pi, np.pi, self.dimension))

    # -- group algebras ----------------------------------------------------

    def canonical_unitary(self, g):
        """Canonical unitary u_g of a group algebra (left translation by g)."""
        if self.group is None:
            raise ValidationError(f"{self.name} is not a group algebra")
        if not isinstance(g, (int, np.integer)) or not 0 <= g < self.group.order:
            raise ValidationError(f"Group element {g!r} is out of range 0..{self.group.order - 1}")
        return AlgElement(self, self.basis[int(g)].copy())


@dataclass(frozen=True, eq=False)
class AlgElement:
    """An element of a tracial algebra, stored as a matrix."""

    algebra: TracialAlgebra
    matrix: np.ndarray

    @cached_property
    def norm2(self):
        return self.algebra.norm2(self.matrix)

    @property
    def adjoint(self):
        return AlgElement(self.algebra, self.matrix.conj().T)

    def is_unitary(self, tol=None):
        return is_unitary(self.matrix, tol)

    def in_ball(self, tol=None):
        tol = config.BALL_TOL if tol is None else tol
        return operator_norm(self.matrix) <= 1 + tol


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def matrix_algebra(k):
    """M_k with the normalized trace."""
    if not isinstance(k, int) or k < 1:
        raise ValidationError(f"Matrix size must be a positive integer, got {k!r}")
    _check_ambient(f"M{k}", k)
    basis = np.zeros((k * k, k, k), dtype=complex)
    for i in range(k):
        for j in range(k):
            basis[i * k + j, i, j] = np.sqrt(k)
    algebra = TracialAlgebra(basis, np.eye(k) / k, name=f"M{k}")
    logger.info("Built matrix algebra M%d", k)
    return algebra


def group_algebra(group):
    """
    Group algebra in the left regular representation; the basis is u_g in
    element order, so coordinates are group-algebra coefficients.
    """
    _check_ambient(f"L({group.name})", group.order)
    n = group.order
    basis = np.zeros((n, n, n), dtype=complex)
    for g in range(n):
        basis[g, group.table[g], np.arange(n)] = 1.0
    algebra = TracialAlgebra(basis, np.eye(n) / n, name=f"L({group.name})", group=group)
    logger.info("Built group algebra of %s, dimension %d", group.name, n)
    return algebra


def tensor(a, b):
    """A (x) B with the product trace."""
    _check_ambient(f"{a.name} (x) {b.name}", a.ambient * b.ambient)
    basis = np.array([np.kron(x, y) for x in a.basis for y in b.basis])
    return TracialAlgebra(basis, np.kron(a.rho, b.rho), name=f"{a.name}(x){b.name}")


def direct_sum(a, b, weights=(0.5, 0.5)):
    """
    A (+) B with trace w_A tau_A + w_B tau_B.

    Args:
        a, b: TracialAlgebra
        weights: Positive pair summing to 1
    """
    weights = tuple(float(w) for w in weights)
    if len(weights) != 2 or min(weights) <= 0 or abs(sum(weights) - 1) > 1e-12:
        raise ValidationError(f"Direct-sum weights must be two positive reals summing to 1, got {weights}")
    _check_ambient(f"{a.name} (+) {b.name}", a.ambient + b.ambient)
    wa, wb = weights
    basis = [linalg.block_diag(x / np.sqrt(wa), np.zeros((b.ambient, b.ambient))) for x in a.basis]
    basis += [linalg.block_diag(np.zeros((a.ambient, a.ambient)), y / np.sqrt(wb)) for y in b.basis]
    rho = linalg.block_diag(wa * a.rho, wb * b.rho)
    return TracialAlgebra(np.array(basis), rho, name=f"{a.name}(+){b.name}")


# ---------------------------------------------------------------------------
# Subalgebras
# ---------------------------------------------------------------------------

def _span_basis(algebra, matrices):
    """Trace-orthonormal basis of the span of `matrices`."""
    cols = np.stack([algebra.embed(m) for m in matrices], axis=1)
    q = linalg.orth(cols, rcond=config.RANK_TOL)
    return q.T.reshape(-1, algebra.ambient, algebra.ambient) @ algebra.rho_isqrt


def _subalgebra(parent, basis, name, validate=True):
    return TracialAlgebra(basis, parent.rho, name=name, validate=validate)


def _element_set(algebra, elements):
    if isinstance(elements, TracialAlgebra):
        return list(elements.basis)
    if isinstance(elements, (AlgElement, np.ndarray)) and np.ndim(_as_matrix(elements)) == 2:
        elements = [elements]
    mats = [_as_matrix(e) for e in elements]
    for m in mats:
        if m.shape != (algebra.ambient, algebra.ambient):
            raise ValidationError(f"Element of shape {m.shape} does not fit {algebra.name}")
    return mats


def generated_subalgebra(algebra, elements):
    """Smallest *-subalgebra containing `elements` and 1."""
    gens = _element_set(algebra, elements)
    for g in gens:
        if not algebra.contains(g):
            raise ValidationError(f"Generator is not an element of {algebra.name}")
    gens = gens + [g.conj().T for g in gens]
    current = _span_basis(algebra, [algebra.identity])
    while True:
        products = [b @ g for b in current for g in gens]
        grown = _span_basis(algebra, list(current) + products)
        if grown.shape[0] == current.shape[0]:
            break
        current = grown
    return _subalgebra(algebra, current, name=f"<S> in {algebra.name}")


def commutant(algebra, elements, validate=True):
    """
    Elements of `algebra` commuting with `elements` and their adjoints.

    Args:
        algebra: TracialAlgebra
        elements: A TracialAlgebra, an element, or an iterable of elements
        validate: Re-check the *-algebra structure of the result

    Returns:
        TracialAlgebra, a *-subalgebra of `algebra`
    """
    mats = _element_set(algebra, elements)
    mats = mats + [m.conj().T for m in mats]
    if not mats:
        return algebra
    blocks = []
    for s in mats:
        blocks.append(np.stack([algebra.embed(b @ s - s @ b) for b in algebra.basis], axis=1))
    kernel = linalg.null_space(np.vstack(blocks), rcond=config.RANK_TOL)
    basis = np.tensordot(kernel.T, algebra.basis, axes=1)
    logger.debug("Commutant in %s has dimension %d", algebra.name, basis.shape[0])
    return _subalgebra(algebra, basis, name=f"C(S) in {algebra.name}", validate=validate)


def center(algebra):
    return commutant(algebra, algebra)


def relative_commutant(algebra, S, T):
    """C(S)' n C(T): elements commuting with T and with everything commuting with S."""
    c_s = commutant(algebra, S)
    return commutant(algebra, list(c_s.basis) + _element_set(algebra, T))


def conditional_expectation(algebra, subalgebra, x):
    """
    Trace-preserving conditional expectation onto a unital *-subalgebra.

    Args:
        algebra: Ambient TracialAlgebra
        subalgebra: TracialAlgebra contained in `algebra`, containing 1
        x: Element of `algebra`

    Returns:
        AlgElement of `subalgebra`
    """
    if not subalgebra.is_subalgebra_of(algebra):
        raise ValidationError(f"{subalgebra.name} is not a unital *-subalgebra of {algebra.name}")
    m = _as_matrix(x)
    if not algebra.contains(m):
        raise ValidationError(f"Element is not in {algebra.name}")
    return AlgElement(subalgebra, subalgebra.project(m))


def distance_to(algebra, subalgebra, x):
    """||x - E(x)||_2, the trace-norm distance from x to the subalgebra."""
    m = _as_matrix(x)
    return algebra.norm2(m - subalgebra.project(m))
