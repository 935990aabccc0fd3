"""
Tests for prenex normalization and alternation counting.
"""
import numpy as np
import pytest

from errors import ValidationError
from formulas import (
    Var, One, Norm2, Dist2, Const, Max, Min, Plus, DotMinus, Sqrt, Square, Scale,
    Sup, Inf, Sort, QuantKind, build_tau_m, build_theta, relativize, commutator,
)
from formulas.syntax import ScaleTerm, Add, is_sentence
from prenex import (
    to_prenex, is_prenex, alternation_count, block_structure, prenex_report,
    is_penalty_variable, merge_prefixes, PrefixEntry, Convention, standardize_apart,
)
from evaluator import evaluate_oracle

U1 = ('U1a', 'U1b')
U2 = ('U2a', 'U2b')


def kinds(prenex):
    return [(kind.value, count) for kind, count in block_structure(prenex.prefix)]


class TestToPrenex:

    def test_tau_has_three_blocks(self):
        for m in (1, 2):
            p = to_prenex(build_tau_m(m))
            assert kinds(p) == [('inf', 2), ('sup', 2 * m), ('inf', 1)]
            assert alternation_count(p) == 3
            assert alternation_count(p, Convention.SWITCHES) == 2

    def test_dotminus_flips_right_argument(self):
        f = DotMinus(Const(1), Sup('X', Sort.BALL, Norm2(Var('X'))))
        p = to_prenex(f)
        assert [e.kind for e in p.prefix] == [QuantKind.INF]
        assert is_prenex(p.to_formula())

    def test_vacuous_quantifiers_are_dropped(self):
        p = to_prenex(Sup('X', Sort.BALL, Plus(Const(1), Inf('Y', Sort.BALL, Norm2(Var('Y'))))))
        assert p.variables == ('Y',)

    def test_shadowed_names_are_renamed(self):
        inner = Inf('X', Sort.BALL, Dist2(Var('X'), One()))
        f = Sup('X', Sort.BALL, Plus(Norm2(Var('X')), inner))
        p = to_prenex(f)
        assert len(set(p.variables)) == 2
        assert {p.original_name(v) for v in p.variables} == {'X'}
        assert is_sentence(p.to_formula())

    def test_standardize_apart_is_deterministic(self):
        f = Max((Sup('X', Sort.BALL, Norm2(Var('X'))), Sup('X', Sort.BALL, Norm2(Var('X')))))
        first, renaming = standardize_apart(f)
        assert standardize_apart(f)[0] == first
        assert renaming == (('X#1', 'X'),)

    def test_idempotent(self):
        p = to_prenex(build_theta(build_tau_m(1), 2))
        assert to_prenex(p.to_formula()) == p

    def test_merge_takes_leading_runs(self):
        s = lambda v: PrefixEntry(QuantKind.SUP, v, Sort.BALL)  # noqa: E731
        i = lambda v: PrefixEntry(QuantKind.INF, v, Sort.BALL)  # noqa: E731
        merged = merge_prefixes([[s('a'), i('b')], [s('c'), s('d')], [i('e')]])
        assert [e.var for e in merged] == ['a', 'c', 'd', 'b', 'e']
        assert len(block_structure(merged)) == 2

    def test_alternations_need_prenex_input(self):
        with pytest.raises(ValidationError):
            alternation_count(Plus(Sup('X', Sort.BALL, Norm2(Var('X'))), Const(1)))

    def test_report(self):
        report = prenex_report(to_prenex(build_tau_m(1)))
        assert report['blocks'] == 3
        assert report['begins_with'] == 'inf'
        assert [e['var'] for e in report['prefix']] == ['Va', 'Vb', 'X1', 'Y1', 'U']


class TestThetaAlternations:

    @pytest.mark.parametrize('n', [1, 2, 3])
    def test_alternations_grow_by_five(self, n):
        theta = build_theta(build_tau_m(1), n)
        assert alternation_count(to_prenex(theta)) == 5 * (n - 1) + 3

    @pytest.mark.slow
    def test_level_four(self):
        theta = build_theta(build_tau_m(1), 4)
        assert alternation_count(to_prenex(theta)) == 18

    def test_counts_do_not_depend_on_m(self):
        counts = {alternation_count(to_prenex(build_theta(build_tau_m(m), 2))) for m in (1, 2)}
        assert counts == {8}


class TestRelativizedStructure:

    def test_one_trailing_penalty_block(self):
        tau = to_prenex(build_tau_m(1))
        rel = to_prenex(relativize(tau.to_formula(), U1, U2))
        original = block_structure(tau.prefix)
        assert block_structure(rel.prefix, keep=lambda v: not is_penalty_variable(v)) == original
        assert len(block_structure(rel.prefix)) == len(original) + 1
        assert all(is_penalty_variable(e.var) for e in rel.prefix[-1:])

    @pytest.mark.parametrize('seed', range(10))
    def test_random_sentences_keep_their_blocks(self, seed):
        prenex = to_prenex(_random_formula(np.random.default_rng(100 + seed)))
        rel = to_prenex(relativize(prenex.to_formula(), U1, U2))
        original = block_structure(prenex.prefix)
        assert block_structure(rel.prefix, keep=lambda v: not is_penalty_variable(v)) == original
        expected = len(original) + 1 if original else 0
        assert len(block_structure(rel.prefix)) == expected

    def test_free_variables_are_the_unitaries(self):
        rel = relativize(to_prenex(build_tau_m(1)).to_formula(), U1, U2)
        assert is_prenex(rel)
        assert to_prenex(rel).prefix
        assert not (set(U1) | set(U2)) & set(to_prenex(rel).variables)


# -- value preservation ------------------------------------------------------

def _random_formula(rng, bound=(), quantifiers=None, depth=0):
    """Random formula over C^2: mostly unitary quantifiers, at most one Ball."""
    quantifiers = quantifiers if quantifiers is not None else {'count': 0, 'ball': 0}
    choice = rng.integers(0, 10)
    if depth < 4 and quantifiers['count'] < 3 and (choice < 4 or not bound):
        quantifiers['count'] += 1
        sort = Sort.UNITARY
        if quantifiers['ball'] == 0 and rng.random() < 0.3:
            sort = Sort.BALL
            quantifiers['ball'] += 1
        var = ['X', 'Y', 'Z'][rng.integers(0, 3)]
        cls = Sup if rng.random() < 0.5 else Inf
        return cls(var, sort, _random_formula(rng, bound + (var,), quantifiers, depth + 1))
    if depth >= 4 or choice < 6:
        if not bound:
            return Const(float(rng.integers(0, 3)) / 2)
        a = Var(bound[rng.integers(0, len(bound))])
        b = Var(bound[rng.integers(0, len(bound))])
        atoms = [Dist2(a, b), Norm2(Add(a, ScaleTerm(0.5j, b))), Dist2(a, One()),
                 Norm2(commutator(a, b))]
        return atoms[rng.integers(0, len(atoms))]
    left = _random_formula(rng, bound, quantifiers, depth + 1)
    op = rng.integers(0, 7)
    if op == 0:
        return Max((left, _random_formula(rng, bound, quantifiers, depth + 1)))
    if op == 1:
        return Min((left, _random_formula(rng, bound, quantifiers, depth + 1)))
    if op == 2:
        return Plus(left, _random_formula(rng, bound, quantifiers, depth + 1))
    if op == 3:
        return DotMinus(left, _random_formula(rng, bound, quantifiers, depth + 1))
    if op == 4:
        return Sqrt(left)
    if op == 5:
        return Square(left)
    return Scale(0.5, left)


class TestValuePreservation:

    @pytest.mark.parametrize('seed', range(12))
    def test_prenex_form_has_the_same_grid_value(self, c2, seed):
        rng = np.random.default_rng(seed)
        formula = _random_formula(rng)
        prenex = to_prenex(formula).to_formula()
        original = evaluate_oracle(formula, c2, grid=4)
        normalized = evaluate_oracle(prenex, c2, grid=4)
        assert normalized.value == pytest.approx(original.value, abs=1e-9)
