"""
Tests for finite groups, tracial algebras and good pairs.
"""
import math
import os

import numpy as np
import pytest
from sympy.combinatorics.named_groups import DihedralGroup
from sympy.combinatorics.homomorphisms import is_isomorphic

import config
from errors import ValidationError, SizeCapError
from algebra import (
    FiniteGroup, cyclic_group, symmetric_group, direct_power, wreath, named_group,
    matrix_algebra, group_algebra, tensor, direct_sum, generated_subalgebra,
    commutant, center, relative_commutant, conditional_expectation, distance_to,
    is_good_pair, clock_matrix, shift_matrix, resolve_algebra, resolve_unitary,
    clip_to_ball, operator_norm, is_unitary,
)
from formulas import Sqrt, build_chi
from evaluator import Assignment, evaluate


class TestGroups:

    def test_cyclic(self):
        g = cyclic_group(4)
        assert g.order == 4
        assert g.is_abelian()
        assert g.multiply(3, 2) == 1

    def test_symmetric_group_composition(self):
        s3 = symmetric_group(3)
        assert s3.order == 6
        assert not s3.is_abelian()
        for a in range(6):
            for b in range(6):
                composed = s3.permutations[a][s3.permutations[b]]
                assert s3.permutations[s3.multiply(a, b)].tolist() == composed.tolist()

    def test_invalid_tables(self):
        with pytest.raises(ValidationError):
            FiniteGroup([[0, 1], [0, 1]])
        with pytest.raises(ValidationError):
            FiniteGroup([[0, 1, 2], [1, 2, 0], [2, 1, 0]])

    def test_conjugacy_classes_of_s3(self):
        sizes = sorted(len(c) for c in symmetric_group(3).conjugacy_classes())
        assert sizes == [1, 2, 3]

    def test_direct_power(self):
        g = direct_power(cyclic_group(2), 3)
        assert g.order == 8
        assert g.is_abelian()
        assert direct_power(cyclic_group(3), 1).order == 3

    def test_wreath_orders(self):
        assert wreath(cyclic_group(2), 3).order == 48
        assert wreath(cyclic_group(3), 2).order == 18
        assert wreath(cyclic_group(2), 1).permutation_elements == [0]

    def test_wreath_z2_2_is_dihedral(self):
        w = wreath(cyclic_group(2), 2)
        assert is_isomorphic(w.to_permutation_group(), DihedralGroup(4))

    def test_permutation_elements_form_symmetric_group(self):
        w = wreath(cyclic_group(2), 3)
        elements = set(w.permutation_elements)
        assert len(elements) == 6
        for a in elements:
            for b in elements:
                assert w.multiply(a, b) in elements

    def test_size_cap(self, monkeypatch):
        monkeypatch.setattr(config, 'SIZE_CAP', 16)
        with pytest.raises(SizeCapError) as exc:
            wreath(cyclic_group(2), 3)
        assert exc.value.exit_code == 3
        assert 'TL_SIZE_CAP' in str(exc.value)

    def test_named_groups(self):
        assert named_group('S3').order == 6
        with pytest.raises(ValidationError):
            named_group('A5')


class TestTracialAlgebra:

    def test_matrix_algebra_trace(self, m2, pauli):
        x, y, z = pauli
        assert m2.dimension == 4
        assert m2.trace(np.eye(2)) == pytest.approx(1)
        assert m2.norm2(x) == pytest.approx(1)
        assert m2.inner(x, z) == pytest.approx(0)

    def test_group_algebra_trace_is_identity_coefficient(self, s3_algebra):
        u = s3_algebra.canonical_unitary(3).matrix
        assert s3_algebra.trace(u) == pytest.approx(0)
        assert s3_algebra.trace(s3_algebra.identity) == pytest.approx(1)
        assert is_unitary(u)

    def test_tensor_and_direct_sum(self, m2, c2):
        t = tensor(m2, m2)
        assert t.dimension == 16 and t.ambient == 4
        d = direct_sum(m2, c2, (0.75, 0.25))
        assert d.dimension == 6
        assert d.trace(d.identity) == pytest.approx(1)
        with pytest.raises(ValidationError):
            direct_sum(m2, c2, (0.5, 0.6))

    def test_membership(self, c2, pauli):
        assert not c2.contains(pauli[2])
        assert c2.contains(c2.canonical_unitary(1).matrix)

    def test_clip_to_ball(self):
        x = np.diag([3.0, 0.5]).astype(complex)
        assert operator_norm(clip_to_ball(x)) == pytest.approx(1)
        assert np.allclose(clip_to_ball(x), np.diag([1.0, 0.5]))

    def test_unitary_parametrization_round_trip(self, s3_algebra):
        rng = np.random.default_rng(1)
        u = s3_algebra.random_unitary(rng)
        params = s3_algebra.unitary_parameters(u)
        assert np.allclose(s3_algebra.unitary_point(params), u, atol=1e-8)

    def test_real_coordinates_round_trip(self, m2):
        rng = np.random.default_rng(2)
        x = m2.random_element(rng)
        assert np.allclose(m2.from_real(m2.real_coordinates(x)), x)


class TestSubalgebras:

    def test_center_of_s3_has_class_dimension(self, s3_algebra):
        assert center(s3_algebra).dimension == 3

    def test_center_of_matrix_algebra_is_scalars(self, m2):
        assert center(m2).dimension == 1

    def test_bicommutant_is_generated_algebra(self, m2, pauli):
        z = pauli[2]
        c = commutant(m2, [z])
        assert c.dimension == 2
        bicommutant = commutant(m2, c)
        assert bicommutant.dimension == generated_subalgebra(m2, [z]).dimension == 2

    def test_commutant_includes_adjoints(self, m2):
        shift = np.array([[0, 1], [0, 0]], dtype=complex)
        assert commutant(m2, [shift]).dimension == 1

    def test_relative_commutant(self, pauli):
        m4 = tensor(matrix_algebra(2), matrix_algebra(2))
        x, _, z = pauli
        x2, z2 = np.kron(np.eye(2), x), np.kron(np.eye(2), z)
        # C(S) is M2 (x) 1, so C(S)' is 1 (x) M2
        assert relative_commutant(m4, [x2, z2], []).dimension == 4
        assert relative_commutant(m4, [x2, z2], [x2]).dimension == 2
        assert relative_commutant(m4, [x2, z2], [x2, z2]).dimension == 1

    def test_conditional_expectation(self, m2, pauli):
        x, _, z = pauli
        diag = commutant(m2, [z])
        a = np.array([[1, 2], [3, 4]], dtype=complex)
        e = conditional_expectation(m2, diag, a)
        assert np.allclose(e.matrix, np.diag([1, 4]))
        assert m2.trace(e.matrix) == pytest.approx(m2.trace(a))
        assert distance_to(m2, diag, a) == pytest.approx(math.sqrt((4 + 9) / 2))
        # bimodule property E(d a d') = d E(a) d'
        d = np.diag([2.0, -1.0]).astype(complex)
        assert np.allclose(conditional_expectation(m2, diag, d @ a @ d).matrix, d @ e.matrix @ d)

    def test_expectation_needs_a_subalgebra(self, m2):
        with pytest.raises(ValidationError):
            conditional_expectation(m2, matrix_algebra(3), np.eye(2))

    @pytest.mark.parametrize('case', ['tensor', 's3'])
    def test_expectations_compose_down_a_chain(self, case, pauli, s3_algebra):
        x, _, z = pauli
        if case == 'tensor':
            algebra = tensor(matrix_algebra(2), matrix_algebra(2))
            x1, z1 = np.kron(x, np.eye(2)), np.kron(z, np.eye(2))
            small, large = commutant(algebra, [x1, z1]), commutant(algebra, [x1])
        else:
            algebra = s3_algebra
            rotation = next(g for g in range(1, 6) if algebra.group.multiply(g, g) != algebra.group.identity)
            small, large = center(algebra), commutant(algebra, [algebra.canonical_unitary(rotation)])
        assert small.dimension < large.dimension
        assert small.is_subalgebra_of(large)
        rng = np.random.default_rng(8)
        for _ in range(10):
            y = algebra.random_element(rng)
            direct = conditional_expectation(algebra, small, y).matrix
            through = conditional_expectation(algebra, large, y).matrix
            assert np.allclose(conditional_expectation(algebra, small, through).matrix, direct, atol=1e-10)
            assert np.allclose(conditional_expectation(algebra, large, direct).matrix, direct, atol=1e-10)
            assert algebra.trace(direct) == pytest.approx(algebra.trace(y))

    def test_expectation_is_the_nearest_point(self, pauli):
        m4 = tensor(matrix_algebra(2), matrix_algebra(2))
        x, _, z = pauli
        sub = commutant(m4, [np.kron(x, np.eye(2)), np.kron(z, np.eye(2))])
        rng = np.random.default_rng(9)
        for _ in range(20):
            y = m4.random_element(rng)
            best = distance_to(m4, sub, y)
            for _ in range(5):
                other = sub.from_coordinates(rng.standard_normal(sub.dimension)
                                             + 1j * rng.standard_normal(sub.dimension))
                assert best <= m4.norm2(y - other) + 1e-12


class TestReferenceUnitaries:

    def test_matrix_algebra_gives_anticommuting_reflections(self, m2):
        refs = m2.reference_unitaries
        assert len(refs) == 3
        for i, u in enumerate(refs):
            assert is_unitary(u) and np.allclose(u, u.conj().T)
            assert abs(m2.trace(u)) < 1e-10
            for v in refs[i + 1:]:
                assert np.allclose(u @ v, -v @ u, atol=1e-10)

    def test_group_algebra_gives_canonical_unitaries(self, s3_algebra):
        canonical = [s3_algebra.canonical_unitary(g).matrix for g in range(6) if g != s3_algebra.group.identity]
        refs = s3_algebra.reference_unitaries
        assert len(refs) == 5
        assert all(any(np.allclose(u, c) for c in canonical) for u in refs)

    def test_subalgebras_give_their_own_unitaries(self, m2, pauli):
        assert center(m2).reference_unitaries == []
        diag = commutant(m2, [pauli[2]])
        (u,) = diag.reference_unitaries
        assert diag.contains(u) and is_unitary(u)
        assert np.allclose(u @ u, np.eye(2))


class TestGoodPairs:

    def test_pauli_pair(self, m2, pauli):
        x, _, z = pauli
        report = is_good_pair(m2, x, z)
        assert report.residual == pytest.approx(400)
        assert report.good and report.exact and not report.vacuous
        assert report.commutant_dimension == 1

    def test_clock_and_shift(self):
        for k, expected in ((3, 300), (4, 200)):
            algebra = matrix_algebra(k)
            report = is_good_pair(algebra, clock_matrix(k), shift_matrix(k))
            assert report.residual == pytest.approx(expected)

    def test_pair_on_first_tensor_factor(self, pauli):
        m4 = tensor(matrix_algebra(2), matrix_algebra(2))
        x, _, z = pauli
        x1, z1 = np.kron(x, np.eye(2)), np.kron(z, np.eye(2))
        report = is_good_pair(m4, x1, z1)
        assert report.commutant_dimension == 4
        assert report.good

    def test_identity_pair_on_tensor(self):
        m4 = tensor(matrix_algebra(2), matrix_algebra(2))
        report = is_good_pair(m4, np.eye(4), np.eye(4))
        assert report.vacuous
        assert math.isinf(report.residual)

    def test_abelian_pairs_are_vacuous(self, c2):
        report = is_good_pair(c2, c2.canonical_unitary(1), c2.identity)
        assert report.vacuous and report.good

    def test_s3_generators(self, s3_algebra):
        s3 = s3_algebra.group
        transposition = next(g for g in range(6) if g != s3.identity and s3.multiply(g, g) == s3.identity)
        rotation = next(g for g in range(6) if s3.multiply(s3.multiply(g, g), g) == s3.identity
                        and g != s3.identity)
        report = is_good_pair(s3_algebra, s3_algebra.canonical_unitary(transposition),
                              s3_algebra.canonical_unitary(rotation))
        assert report.commutant_dimension == 3
        assert report.residual > 0

    def test_numeric_exponent(self, m2, pauli):
        x, _, z = pauli
        report = is_good_pair(m2, x, z, p=1.5)
        assert not report.exact
        assert report.residual > 0

    def test_chi_bounds_the_distance_to_the_commutant(self, pauli):
        x, _, z = pauli
        rng = np.random.default_rng(4)
        chi = Sqrt(build_chi('X', 'U1', 'U2'))
        for algebra, u1, u2 in ((matrix_algebra(2), x, z),
                                (matrix_algebra(3), clock_matrix(3), shift_matrix(3))):
            assert is_good_pair(algebra, u1, u2).good
            target = commutant(algebra, [u1, u2])
            for _ in range(20):
                element = algebra.random_element(rng)
                values = Assignment(algebra, {'X': element, 'U1': u1, 'U2': u2}, unitary=['U1', 'U2'])
                assert distance_to(algebra, target, element) <= evaluate(chi, algebra, values).value + 1e-8
            scalar = Assignment(algebra, {'X': 0.5 * algebra.identity, 'U1': u1, 'U2': u2},
                                unitary=['U1', 'U2'])
            assert evaluate(build_chi('X', 'U1', 'U2'), algebra, scalar).value <= 1e-10

    def test_rejects_non_unitary(self, m2):
        with pytest.raises(ValidationError):
            is_good_pair(m2, np.eye(2) * 2, np.eye(2))

    @pytest.mark.parametrize('name', ['Z4', 'S3', 'Z2xZ2'])
    def test_residual_inequality_on_group_algebras(self, name):
        if name == 'Z2xZ2':
            group = direct_power(cyclic_group(2), 2)
        else:
            group = named_group(name)
        algebra = group_algebra(group)
        others = [g for g in range(group.order) if g != group.identity]
        g1, g2 = others[0], others[1]
        if not group.is_abelian():
            # two non-commuting elements generate S3
            g2 = next(g for g in others if group.multiply(g1, g) != group.multiply(g, g1))
        u1, u2 = algebra.canonical_unitary(g1).matrix, algebra.canonical_unitary(g2).matrix
        report = is_good_pair(algebra, u1, u2)
        target = commutant(algebra, [u1, u2])
        assert report.commutant_dimension == target.dimension
        assert report.vacuous == group.is_abelian()
        rng = np.random.default_rng(12)
        for _ in range(50):
            element = algebra.random_element(rng)
            gap = distance_to(algebra, target, element) ** 2
            drift = sum(algebra.norm2(element @ u - u @ element) ** 2 for u in (u1, u2))
            if report.vacuous:
                assert gap <= 1e-20 and drift <= 1e-20
            else:
                assert report.residual * gap <= report.constant * drift + 1e-9
                if report.good:
                    assert gap <= report.constant * drift + 1e-9


class TestSpecs:

    def test_resolve_names_and_files(self):
        assert resolve_algebra('M3').dimension == 9
        assert resolve_algebra('S3').dimension == 6
        assert resolve_algebra('wreath:Z2:2').dimension == 8
        assert resolve_algebra(os.path.join(config.ALGEBRA_SPECS_DIR, 'm2_tensor_m2.json')).dimension == 16
        assert resolve_algebra('{"power": ["Z2", 2]}').spec == {'power': ['Z2', 2]}

    def test_resolve_unitary(self, m2):
        assert np.allclose(resolve_unitary(m2, '{"shift": true}'), shift_matrix(2))
        with pytest.raises(ValidationError):
            resolve_unitary(m2, '{"element": 1}')
        with pytest.raises(ValidationError):
            resolve_unitary(m2, '{"matrix": [[[2, 0], [0, 0]], [[0, 0], [1, 0]]]}')
