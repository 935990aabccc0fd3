"""
Sentence Lab - Command Line Interface

Builds the theta sentences, analyzes their quantifier structure, and
evaluates formulas in finite-dimensional tracial algebras.
"""
import json
import logging
import sys
from functools import wraps

import click

import config
from errors import SentenceLabError, ValidationError
from formulas import SentenceSpec, dumps, loads, to_latex, compute_delta, value_bound
from formulas.syntax import free_variables, formula_size, is_sentence
from formulas.modulus import modulus_of
from formulas.codec import SCHEMA_VERSION, formula_to_json
from prenex import to_prenex, prenex_report, alternation_count
from algebra import (
    resolve_algebra, resolve_unitary, group_from_spec, center, is_good_pair,
)
from algebra.specs import read_json
from evaluator import (
    Assignment, EvalBudget, evaluate as evaluate_formula, evaluate_oracle,
    run_t0_t1_experiment, ExperimentHistory, format_duration,
)


def handle_errors(f):
    """Decorator mapping library errors to their exit codes."""
    @wraps(f)
    def decorated_function(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except SentenceLabError as exc:
            click.echo(f"Error: {exc}", err=True)
            sys.exit(exc.exit_code)
    return decorated_function


def _write(payload, out):
    """Write JSON (or text) to a file, else to stdout."""
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2)
    if out:
        with open(out, 'w', encoding='utf-8') as f:
            f.write(text + '\n')
        click.echo(f"Written to {out}", err=True)
    else:
        click.echo(text)


def _read_formula(path):
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return loads(f.read())
    except OSError as exc:
        raise ValidationError(f"Cannot read formula file {path}: {exc}") from exc


def _budget(seed, restarts, iters, nested_restarts, nested_iters, workers):
    options = {
        'seed': seed, 'restarts': restarts, 'iterations': iters,
        'nested_restarts': nested_restarts, 'nested_iterations': nested_iters,
        'workers': workers,
    }
    return EvalBudget(**{k: v for k, v in options.items() if v is not None})


def budget_options(f):
    """Shared optimizer budget options."""
    options = [
        click.option('--seed', type=int, default=None, help='Root seed'),
        click.option('--budget-restarts', 'restarts', type=int, default=None,
                     help='Restarts of each outermost quantifier block'),
        click.option('--budget-iters', 'iters', type=int, default=None,
                     help='Objective evaluations per restart'),
        click.option('--nested-restarts', type=int, default=None,
                     help='Restarts of each nested quantifier block'),
        click.option('--nested-iters', type=int, default=None,
                     help='Objective evaluations per nested restart'),
        click.option('--workers', type=int, default=None,
                     help='Threads for outermost restarts'),
    ]
    for option in reversed(options):
        f = option(f)
    return f


@click.group()
@click.option('--verbose', is_flag=True, help='Log progress to stderr')
def cli(verbose):
    """Sentence Lab: theta sentences and tracial algebra evaluation."""
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format='%(asctime)s %(name)s %(levelname)s: %(message)s',
    )


@cli.command()
@click.option('--m', 'm', type=int, required=True, help='Tuple length of tau_m')
@click.option('--n', 'n', type=int, required=True, help='Induction level')
@click.option('--format', 'fmt', type=click.Choice(['json', 'latex', 'prenex']), default='json')
@click.option('--out', type=click.Path(), default=None)
@handle_errors
def emit(m, n, fmt, out):
    """Emit theta_{m,n}; the prenex format adds its block structure and alternation count."""
    if n > config.EMIT_LEVEL_GUARD:
        raise ValidationError(f"Level {n} is above the emit guard {config.EMIT_LEVEL_GUARD}")
    theta = SentenceSpec(m, n).build()
    if fmt == 'latex':
        _write(to_latex(theta), out)
    elif fmt == 'prenex':
        prenex = to_prenex(theta)
        _write({
            'schema': SCHEMA_VERSION,
            'formula': formula_to_json(prenex.to_formula()),
            'prenex': prenex_report(prenex),
            'alternations': alternation_count(prenex),
        }, out)
    else:
        _write(dumps(theta, indent=2), out)


@cli.command()
@click.argument('formula_json', type=click.Path(exists=True))
@click.option('--out', type=click.Path(), default=None)
@handle_errors
def analyze(formula_json, out):
    """Prenex form and alternation counts of a formula."""
    formula = _read_formula(formula_json)
    report = prenex_report(to_prenex(formula))
    report.update({
        'sentence': is_sentence(formula),
        'free_variables': sorted(free_variables(formula)),
        'size': formula_size(formula),
        'value_bound': value_bound(formula),
        'moduli': {v: modulus_of(formula, v).to_list() for v in sorted(free_variables(formula))},
    })
    _write(report, out)


@cli.command('build-algebra')
@click.option('--algebra', 'algebra_spec', required=True, help='Spec file, inline JSON or name')
@click.option('--out', type=click.Path(), default=None)
@handle_errors
def build_algebra(algebra_spec, out):
    """Build and validate an algebra, then summarize it."""
    algebra = resolve_algebra(algebra_spec)
    _write({
        'name': algebra.name,
        'spec': algebra.spec,
        'dimension': algebra.dimension,
        'ambient': algebra.ambient,
        'abelian': algebra.is_abelian(),
        'center_dimension': center(algebra).dimension,
        'group_order': algebra.group.order if algebra.group is not None else None,
    }, out)


@cli.command()
@click.argument('formula_json', type=click.Path(exists=True))
@click.option('--algebra', 'algebra_spec', required=True, help='Spec file, inline JSON or name')
@click.option('--assignment', type=click.Path(exists=True), default=None,
              help='JSON file mapping free variables to matrices')
@budget_options
@click.option('--oracle', is_flag=True, help='Exhaustive grid search instead of the optimizer')
@click.option('--grid', type=int, default=None, help='Oracle points per axis')
@click.option('--out', type=click.Path(), default=None)
@handle_errors
def evaluate(formula_json, algebra_spec, assignment, seed, restarts, iters,
             nested_restarts, nested_iters, workers, oracle, grid, out):
    """Evaluate a formula in an algebra."""
    formula = _read_formula(formula_json)
    algebra = resolve_algebra(algebra_spec)
    values = Assignment(algebra)
    if assignment:
        values = Assignment.from_dict(algebra, read_json(assignment))
    if oracle:
        _write(evaluate_oracle(formula, algebra, values, grid).to_dict(), out)
        return
    budget = _budget(seed, restarts, iters, nested_restarts, nested_iters, workers)
    result = evaluate_formula(formula, algebra, values, budget)
    payload = result.to_dict()
    payload['algebra'] = algebra.spec
    _write(payload, out)


@cli.command()
@click.option('--group', 'group_spec', required=True, help='Group name or spec file')
@click.option('--k', 'k', type=int, required=True)
@click.option('--m', 'm', type=int, required=True)
@budget_options
@click.option('--cross-check', is_flag=True, help='Re-run the wreath side with doubled restarts')
@click.option('--out', type=click.Path(), default=None)
@handle_errors
def experiment(group_spec, k, m, seed, restarts, iters, nested_restarts, nested_iters,
               workers, cross_check, out):
    """Compare tau_m on L(G^k) and L(G wr S_k)."""
    spec = read_json(group_spec)
    group = group_from_spec(spec if isinstance(spec, dict) else group_spec)
    budget = _budget(seed, restarts, iters, nested_restarts, nested_iters, workers)
    report = run_t0_t1_experiment(group, k, m, budget, cross_check=cross_check,
                                  history=ExperimentHistory(), trigger='cli')
    _write(report, out)


@cli.command('verify-good-pair')
@click.option('--algebra', 'algebra_spec', required=True)
@click.option('--u1', required=True, help='Unitary spec')
@click.option('--u2', required=True, help='Unitary spec')
@click.option('--p', 'p', type=float, default=None, help='Residual exponent')
@click.option('--c', 'c', type=float, default=None, help='Residual constant')
@click.option('--out', type=click.Path(), default=None)
@handle_errors
def verify_good_pair(algebra_spec, u1, u2, p, c, out):
    """Check whether two unitaries form a good pair."""
    algebra = resolve_algebra(algebra_spec)
    report = is_good_pair(algebra, resolve_unitary(algebra, u1), resolve_unitary(algebra, u2), p, c)
    _write(report.to_dict(), out)


def parse_upsilon(text):
    """'identity' or 'power:P' as a function of t."""
    if text == 'identity':
        return lambda t: t
    if text.startswith('power:'):
        try:
            exponent = float(text.split(':', 1)[1])
        except ValueError as exc:
            raise ValidationError(f"Invalid exponent in {text!r}") from exc
        if not exponent > 0:
            raise ValidationError(f"Exponent must be positive, got {exponent}")
        return lambda t: t ** exponent
    raise ValidationError(f"Expected identity or power:P, got {text!r}")


@cli.command()
@click.option('--C', 'C', type=float, required=True)
@click.option('--m', 'm', type=int, required=True)
@click.option('--upsilon', default='identity', help='identity or power:P')
@handle_errors
def delta(C, m, upsilon):
    """Threshold delta for a stability constant C."""
    _write({'C': C, 'm': m, 'upsilon': upsilon,
            'delta': compute_delta(C, m, parse_upsilon(upsilon))}, None)


@cli.command()
@click.option('--limit', type=int, default=10)
def history(limit):
    """List recent experiment runs."""
    runs = ExperimentHistory().get_recent_runs(limit)
    if not runs:
        click.echo("No experiment runs recorded.")
        return
    for run in runs:
        args = run.get('run') or {}
        values = run.get('values') or {}
        click.echo(
            f"{run['started_at']}  {run['status']:<10} {format_duration(run['duration_seconds']):>8}  "
            f"{args.get('group')} k={args.get('k')} m={args.get('m')}  "
            f"t0={values.get('t0')}  t1={values.get('t1')}"
        )
        for error in run.get('errors', []):
            click.echo(f"    {error}")


if __name__ == '__main__':
    cli()
