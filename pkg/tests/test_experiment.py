"""
Tests for the direct power vs wreath product experiment and its history.
"""
import math
from datetime import datetime, timedelta

import pytest

import config
from errors import ValidationError, SizeCapError
from algebra import cyclic_group, wreath, group_algebra
from algebra.specs import pairs_to_matrix
from formulas import Var, Norm2, build_chi, commutator, conjugate
from evaluator import (
    Assignment, EvalBudget, ExperimentHistory, evaluate, format_duration, run_t0_t1_experiment,
)


@pytest.fixture
def tiny_budget():
    return EvalBudget(restarts=2, iterations=20, nested_restarts=1, nested_iterations=6, seed=5)


def _without_timestamp(report):
    report = dict(report)
    report['provenance'] = {k: v for k, v in report['provenance'].items() if k != 'timestamp'}
    return report


class TestExperiment:

    def test_z2_report(self, tiny_budget, history):
        report = run_t0_t1_experiment(cyclic_group(2), 2, 1, tiny_budget, cross_check=True,
                                      history=history, trigger='test')
        assert report['group'] == 'Z2'
        assert (report['k'], report['m']) == (2, 1)

        t0, t1 = report['t0'], report['t1']
        assert t0['abelian'] and t0['dimension'] == 4
        assert t0['exact_value'] == 0.0
        assert t0['value'] <= 1e-9
        assert not t1['abelian'] and t1['dimension'] == 8
        assert report['values_in_range']

        permutation = t1['permutation_unitary']
        assert permutation['element'] in wreath(cyclic_group(2), 2).permutation_elements
        assert permutation['value'] >= 0.0
        assert isinstance(permutation['attains'], bool)

        check = report['cross_check']
        assert check['budget']['restarts'] == 4
        assert isinstance(check['agrees'], bool)

        provenance = report['provenance']
        assert provenance['seed'] == 5
        assert provenance['budget'] == tiny_budget.to_dict()
        assert provenance['algebras'] == {'t0': 'L(Z2^2)', 't1': 'L(Z2 wr S2)'}
        assert 'numpy' in provenance['versions']

        record = history.get_last_run()
        assert record['trigger'] == 'test'
        assert record['status'] == 'completed'
        assert record['report']['t1']['value'] == t1['value']

    def test_reruns_match(self, tiny_budget):
        first = run_t0_t1_experiment(cyclic_group(2), 2, 1, tiny_budget)
        second = run_t0_t1_experiment(cyclic_group(2), 2, 1, tiny_budget)
        assert _without_timestamp(first) == _without_timestamp(second)

    def test_witnesses_reproduce_the_block_values(self, tiny_budget):
        report = run_t0_t1_experiment(cyclic_group(2), 2, 1, tiny_budget)
        side = report['t1']
        algebra = group_algebra(wreath(cyclic_group(2), 2))
        blocks = {w['depth']: w for w in side['witnesses']}
        assert [w['depth'] for w in side['witnesses']] == [0, 1, 2]
        assert [blocks[d]['kind'] for d in (0, 1, 2)] == ['inf', 'sup', 'inf']

        values, unitary = {}, []
        for w in side['witnesses']:
            for name, pairs in w['variables'].items():
                values[name] = pairs_to_matrix(pairs)
                if w['sorts'][name] == 'unitary':
                    unitary.append(name)
        assert set(values) == {'Va', 'Vb', 'X1', 'Y1', 'U'}

        def at(formula, names):
            assignment = Assignment(algebra, {n: values[n] for n in names},
                                    unitary=[n for n in names if n in unitary])
            return evaluate(formula, algebra, assignment).value

        spread = at(Norm2(commutator(conjugate(Var('U'), Var('X1')), Var('Y1'))), ('U', 'X1', 'Y1'))
        assert spread == pytest.approx(blocks[2]['value'], abs=1e-9)
        penalty = 2 * math.sqrt(at(build_chi('X1', 'Va', 'Vb'), ('X1', 'Va', 'Vb')))
        assert blocks[1]['value'] == pytest.approx(max(spread - penalty, 0.0), abs=1e-9)
        assert blocks[0]['value'] == pytest.approx(side['value'], abs=1e-12)
        assert blocks[1]['value'] == pytest.approx(side['value'], abs=1e-9)

    def test_large_witnesses_are_reported_as_digests(self, tiny_budget, monkeypatch):
        monkeypatch.setattr(config, 'WITNESS_MATRIX_MAX_AMBIENT', 4)
        report = run_t0_t1_experiment(cyclic_group(2), 2, 1, tiny_budget)
        assert all('variables' in w for w in report['t0']['witnesses'])
        digests = [w['digest'] for w in report['t1']['witnesses']]
        assert all(d.startswith('sha256:') and len(d) == 7 + 64 for d in digests)
        assert not any('variables' in w for w in report['t1']['witnesses'])
        again = run_t0_t1_experiment(cyclic_group(2), 2, 1, tiny_budget)
        assert [w['digest'] for w in again['t1']['witnesses']] == digests

    def test_failed_run_is_logged_and_reraised(self, tiny_budget, history, monkeypatch):
        # Z2^2 fits under the cap, the wreath product of order 8 does not
        monkeypatch.setattr(config, 'SIZE_CAP', 6)
        with pytest.raises(SizeCapError):
            run_t0_t1_experiment(cyclic_group(2), 2, 1, tiny_budget, history=history, trigger='test')
        record = history.get_last_run()
        assert record['status'] == 'failed'
        assert record['report'] is None and record['values'] is None
        assert record['run'] == {'group': 'Z2', 'k': 2, 'm': 1, 'cross_check': False}
        assert record['budget'] == tiny_budget.to_dict()
        assert record['errors'][0].startswith('SizeCapError')
        assert history.get_statistics()['failed_runs'] == 1

    def test_rejects_bad_k(self, tiny_budget):
        with pytest.raises(ValidationError):
            run_t0_t1_experiment(cyclic_group(2), 0, 1, tiny_budget)

    @pytest.mark.slow
    def test_z3_pair(self):
        report = run_t0_t1_experiment(cyclic_group(3), 2, 1, EvalBudget(restarts=2, iterations=40))
        assert report['values_in_range']
        assert report['t0']['value'] <= 1e-9


class TestHistory:

    def test_records_are_trimmed(self, tmp_path):
        history = ExperimentHistory(history_file=str(tmp_path / 'h.json'), limit=2)
        start = datetime(2024, 1, 1, 12, 0, 0)
        for i in range(3):
            history.create_record(start + timedelta(minutes=i), start + timedelta(minutes=i, seconds=90),
                                  {'group': 'Z2', 'run': i})
        runs = history.get_recent_runs()
        assert [r['report']['run'] for r in runs] == [2, 1]
        assert runs[0]['duration_seconds'] == 90

    def test_statistics(self, history):
        assert history.get_statistics()['total_runs'] == 0
        assert history.get_last_run() is None
        start = datetime(2024, 1, 1)
        history.create_record(start, start + timedelta(seconds=10), {}, status='failed', errors=['boom'])
        history.create_record(start + timedelta(hours=1), start + timedelta(hours=1, seconds=30),
                              {'t0': {'value': 0.0}, 't1': {'value': 0.25}})
        stats = history.get_statistics()
        assert stats['total_runs'] == 2
        assert stats['completed_runs'] == 1
        assert stats['failed_runs'] == 1
        assert stats['largest_gap'] == 0.25
        assert stats['average_duration_seconds'] == 20
        assert history.get_last_run()['status'] == 'completed'

    def test_completed_record_carries_run_metadata(self, tiny_budget, history):
        report = run_t0_t1_experiment(cyclic_group(2), 2, 1, tiny_budget, cross_check=True,
                                      history=history)
        record = history.get_last_run()
        assert record['run'] == {'group': 'Z2', 'k': 2, 'm': 1, 'cross_check': True}
        assert record['budget'] == tiny_budget.to_dict()
        assert record['backend'] == 'optimizer'
        assert record['values'] == {
            't0': report['t0']['value'],
            't1': report['t1']['value'],
            'cross_check': report['cross_check']['value'],
        }
        assert record['errors'] == []

    def test_record_failure_keeps_the_error(self, history):
        start = datetime(2024, 1, 1)
        record = history.record_failure(start, start + timedelta(seconds=3), ValueError('bad input'),
                                        run={'group': 'Z3', 'k': 2, 'm': 1}, budget={'restarts': 1})
        assert record['errors'] == ['ValueError: bad input']
        assert history.load_history() == [record]

    def test_corrupt_file_reads_as_empty(self, tmp_path):
        path = tmp_path / 'h.json'
        path.write_text('{not json')
        assert ExperimentHistory(history_file=str(path)).load_history() == []

    @pytest.mark.parametrize('seconds, text', [(59, '59s'), (61, '1m 1s'), (3661, '1h 1m')])
    def test_format_duration(self, seconds, text):
        assert format_duration(seconds) == text
