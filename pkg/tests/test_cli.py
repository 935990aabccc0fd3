"""
Tests for the sentence_lab command line.
"""
import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

import config
from errors import ValidationError
from formulas import (
    Var, Dist2, Norm2, Sup, Inf, Sort, commutator, dumps, loads, build_tau_m, relativize,
)
from prenex import is_prenex, to_prenex
from algebra import resolve_algebra
from evaluator import Assignment, ExperimentHistory
from sentence_lab import cli, parse_upsilon


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def history_file(tmp_path, monkeypatch):
    path = str(tmp_path / 'experiment_history.json')
    monkeypatch.setattr(config, 'EXPERIMENT_HISTORY_FILE', path)
    return path


def _write(path, text):
    path.write_text(text, encoding='utf-8')
    return str(path)


class TestEmit:

    def test_json(self, runner):
        result = runner.invoke(cli, ['emit', '--m', '1', '--n', '1'])
        assert result.exit_code == 0
        assert loads(result.output) == build_tau_m(1)

    def test_prenex_and_latex(self, runner):
        result = runner.invoke(cli, ['emit', '--m', '1', '--n', '2', '--format', 'prenex'])
        assert result.exit_code == 0
        assert is_prenex(loads(result.output))
        result = runner.invoke(cli, ['emit', '--m', '1', '--n', '1', '--format', 'latex'])
        assert result.output.startswith(r'\inf_{Va,Vb}')

    def test_prenex_reports_blocks_and_alternations(self, runner):
        result = runner.invoke(cli, ['emit', '--m', '1', '--n', '2', '--format', 'prenex'])
        payload = json.loads(result.output)
        assert payload['alternations'] == 8
        report = payload['prenex']
        assert report['blocks'] == 8
        assert sum(count for _, count in report['block_structure']) == len(report['prefix'])
        assert report['penalty']['penalty_variables'] > 0
        assert report['penalty']['blocks_without_penalties'] <= report['blocks']

    def test_prenex_of_tau_has_no_penalty_blocks(self, runner):
        payload = json.loads(runner.invoke(cli, ['emit', '--m', '1', '--n', '1', '--format', 'prenex']).output)
        assert payload['alternations'] == 3
        assert payload['prenex']['penalty'] == {
            'penalty_variables': 0, 'penalty_blocks': 0,
            'trailing_penalty_blocks': 0, 'blocks_without_penalties': 3,
        }

    def test_out_file(self, runner, tmp_path):
        out = tmp_path / 'theta.json'
        result = runner.invoke(cli, ['emit', '--m', '2', '--n', '1', '--out', str(out)])
        assert result.exit_code == 0
        assert loads(out.read_text()) == build_tau_m(2)

    def test_level_guard_is_a_validation_error(self, runner):
        result = runner.invoke(cli, ['emit', '--m', '1', '--n', str(config.EMIT_LEVEL_GUARD + 1)])
        assert result.exit_code == 2
        assert 'Error:' in result.output

    def test_bad_m(self, runner):
        result = runner.invoke(cli, ['emit', '--m', '0', '--n', '1'])
        assert result.exit_code == 2


class TestAnalyze:

    def test_tau(self, runner, tmp_path):
        path = _write(tmp_path / 'tau.json', dumps(build_tau_m(1)))
        result = runner.invoke(cli, ['analyze', path])
        assert result.exit_code == 0
        report = json.loads(result.output)
        assert report['blocks'] == 3
        assert report['sentence'] is True
        assert report['free_variables'] == []

    def test_open_formula_reports_moduli(self, runner, tmp_path):
        f = Sup('X', Sort.BALL, Norm2(commutator(Var('X'), Var('Y'))))
        path = _write(tmp_path / 'open.json', dumps(f))
        report = json.loads(runner.invoke(cli, ['analyze', path]).output)
        assert report['free_variables'] == ['Y']
        assert set(report['moduli']) == {'Y'}

    def test_relativized_sentence_reports_its_trailing_penalty_block(self, runner, tmp_path):
        tau = to_prenex(build_tau_m(1)).to_formula()
        rel = relativize(tau, ('U1a', 'U1b'), ('U2a', 'U2b'))
        path = _write(tmp_path / 'rel.json', dumps(rel))
        report = json.loads(runner.invoke(cli, ['analyze', path]).output)
        assert report['blocks'] == 4
        assert report['penalty']['trailing_penalty_blocks'] == 1
        assert report['penalty']['penalty_blocks'] == 1
        assert report['penalty']['blocks_without_penalties'] == 3

    def test_malformed_file(self, runner, tmp_path):
        path = _write(tmp_path / 'bad.json', '{"kind": "nope"}')
        assert runner.invoke(cli, ['analyze', path]).exit_code == 2


class TestAlgebraCommands:

    def test_build_algebra(self, runner):
        result = runner.invoke(cli, ['build-algebra', '--algebra', 'S3'])
        assert result.exit_code == 0
        summary = json.loads(result.output)
        assert summary['dimension'] == 6
        assert summary['center_dimension'] == 3
        assert summary['group_order'] == 6
        assert not summary['abelian']

    def test_size_cap_exit_code(self, runner, monkeypatch):
        monkeypatch.setattr(config, 'SIZE_CAP', 4)
        result = runner.invoke(cli, ['build-algebra', '--algebra', 'S3'])
        assert result.exit_code == 3
        assert 'TL_SIZE_CAP' in result.output

    def test_verify_pauli_pair(self, runner):
        result = runner.invoke(cli, ['verify-good-pair', '--algebra', 'M2',
                                     '--u1', '{"clock": true}', '--u2', '{"shift": true}'])
        assert result.exit_code == 0
        report = json.loads(result.output)
        assert report['residual'] == pytest.approx(400)
        assert report['good']

    def test_verify_rejects_non_unitary(self, runner):
        result = runner.invoke(cli, ['verify-good-pair', '--algebra', 'M2',
                                     '--u1', '{"matrix": [[[2, 0], [0, 0]], [[0, 0], [1, 0]]]}',
                                     '--u2', '{"identity": true}'])
        assert result.exit_code == 2


class TestEvaluateCommand:

    def _files(self, tmp_path, formula, algebra, values, unitary=()):
        formula_path = _write(tmp_path / 'f.json', dumps(formula))
        assignment = Assignment(algebra, values, unitary).to_dict()
        assignment_path = _write(tmp_path / 'a.json', json.dumps(assignment))
        return formula_path, assignment_path

    def test_optimizer(self, runner, tmp_path):
        z = np.diag([1.0, -1.0])
        f = Sup('X', Sort.BALL, Norm2(commutator(Var('X'), Var('Z'))))
        paths = self._files(tmp_path, f, resolve_algebra('M2'), {'Z': z})
        result = runner.invoke(cli, ['evaluate', paths[0], '--algebra', 'M2', '--assignment', paths[1],
                                     '--seed', '1', '--budget-restarts', '2', '--budget-iters', '50'])
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert 0.0 < payload['value'] <= 2.0 + 1e-9
        assert payload['seed'] == 1
        assert payload['budget']['restarts'] == 2
        assert payload['algebra'] == {'matrix': 2}

    def test_oracle(self, runner, tmp_path):
        algebra = resolve_algebra('Z2')
        projection = (algebra.identity + algebra.canonical_unitary(1).matrix) / 2
        f = Inf('U', Sort.UNITARY, Dist2(Var('U'), Var('P')))
        paths = self._files(tmp_path, f, algebra, {'P': projection})
        result = runner.invoke(cli, ['evaluate', paths[0], '--algebra', 'Z2', '--assignment', paths[1],
                                     '--oracle', '--grid', '5'])
        assert result.exit_code == 0
        payload = json.loads(result.output)
        assert payload['value'] - payload['error_bound'] <= math.sqrt(0.5) <= payload['value'] + payload['error_bound']
        assert payload['grid_points'] == 5

    def test_missing_assignment(self, runner, tmp_path):
        path = _write(tmp_path / 'f.json', dumps(Norm2(Var('X'))))
        result = runner.invoke(cli, ['evaluate', path, '--algebra', 'M2'])
        assert result.exit_code == 2

    def test_bad_budget(self, runner, tmp_path):
        path = _write(tmp_path / 'f.json', dumps(build_tau_m(1)))
        result = runner.invoke(cli, ['evaluate', path, '--algebra', 'M2', '--budget-restarts', '0'])
        assert result.exit_code == 2


class TestExperimentCommands:

    def test_experiment_and_history(self, runner, history_file):
        result = runner.invoke(cli, ['history'])
        assert 'No experiment runs recorded.' in result.output

        result = runner.invoke(cli, ['experiment', '--group', 'Z2', '--k', '2', '--m', '1',
                                     '--budget-restarts', '1', '--budget-iters', '10',
                                     '--nested-iters', '4', '--seed', '3'])
        assert result.exit_code == 0
        report = json.loads(result.output)
        assert report['provenance']['seed'] == 3
        assert report['t0']['exact_value'] == 0.0

        record = ExperimentHistory(history_file=history_file).get_last_run()
        assert record['trigger'] == 'cli'
        listing = runner.invoke(cli, ['history', '--limit', '5'])
        assert 'Z2 k=2 m=1' in listing.output

    def test_failed_experiment_is_listed(self, runner, history_file, monkeypatch):
        monkeypatch.setattr(config, 'SIZE_CAP', 6)
        result = runner.invoke(cli, ['experiment', '--group', 'Z2', '--k', '2', '--m', '1',
                                     '--budget-restarts', '1', '--budget-iters', '10'])
        assert result.exit_code == 3
        record = ExperimentHistory(history_file=history_file).get_last_run()
        assert record['status'] == 'failed'
        assert record['trigger'] == 'cli'
        listing = runner.invoke(cli, ['history']).output
        assert 'failed' in listing and 'SizeCapError' in listing

    def test_unknown_group(self, runner, history_file):
        result = runner.invoke(cli, ['experiment', '--group', 'A5', '--k', '2', '--m', '1'])
        assert result.exit_code == 2


class TestDelta:

    def test_identity(self, runner):
        result = runner.invoke(cli, ['delta', '--C', '1', '--m', '2'])
        assert result.exit_code == 0
        assert json.loads(result.output)['delta'] == pytest.approx(math.sqrt(0.25 / (200 * 900)))

    def test_power(self, runner):
        result = runner.invoke(cli, ['delta', '--C', '1', '--m', '1', '--upsilon', 'power:2'])
        assert json.loads(result.output)['delta'] == pytest.approx(math.sqrt(0.25 / (200 * 900)))

    def test_parse_upsilon(self):
        assert parse_upsilon('power:0.5')(4) == pytest.approx(2)
        for text in ('power:-1', 'power:x', 'log'):
            with pytest.raises(ValidationError):
                parse_upsilon(text)
