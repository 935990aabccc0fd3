"""
Direct Power vs Wreath Product Experiment

Evaluates tau_m on the group algebras of G^k and of G wr S_k with the same
budget and seed, and checks whether the inner infimum of the wreath side is
attained at a permutation unitary.
"""
import hashlib
import logging
import platform
from datetime import datetime
from importlib import metadata

import numpy as np

import config
from errors import ValidationError
from formulas.builders import build_tau_m
from formulas.syntax import Var, Max, Norm2, commutator, conjugate
from algebra.groups import direct_power, wreath
from algebra.specs import matrix_to_pairs
from algebra.tracial import group_algebra
from .budget import Assignment, EvalBudget
from .optimizer import evaluate

logger = logging.getLogger(__name__)

VERSIONED_PACKAGES = ('numpy', 'scipy', 'sympy', 'click')


def _versions():
    versions = {'python': platform.python_version()}
    for package in VERSIONED_PACKAGES:
        try:
            versions[package] = metadata.version(package)
        except metadata.PackageNotFoundError:
            versions[package] = None
    return versions


def _spread(m):
    """max_ij ||[U X_i U*, Y_j]||_2, the body of the inner infimum of tau_m."""
    return Max(tuple(
        Norm2(commutator(conjugate(Var('U'), Var(f"X{i}")), Var(f"Y{j}")))
        for i in range(1, m + 1) for j in range(1, m + 1)
    ))


def _witness(result, variable):
    for w in result.witnesses:
        if variable in w.values:
            return w
    return None


def best_permutation_unitary(algebra, group, result, m, tolerance):
    """
    Smallest spread over the permutation unitaries at the optimizer's witness.

    Args:
        algebra: Group algebra of the wreath product
        group: The wreath product, with `permutation_elements`
        result: EvalResult of tau_m on `algebra`
        m: Size parameter of tau_m
        tolerance: Slack allowed when comparing with the optimizer's infimum

    Returns:
        Dict with the best element, its spread, the optimizer's infimum, and
        whether the permutation unitary attains it; None without witnesses
    """
    outer = _witness(result, 'X1')
    inner = _witness(result, 'U')
    if outer is None or inner is None:
        return None
    spread = _spread(m)
    values = {name: outer.values[name] for name in outer.values}
    best = None
    for g in group.permutation_elements:
        values['U'] = algebra.canonical_unitary(g).matrix
        value = evaluate(spread, algebra, Assignment(algebra, values, unitary=['U'])).value
        if best is None or value < best[1]:
            best = (g, value)
    return {
        'element': int(best[0]),
        'value': best[1],
        'inner_value': inner.value,
        'attains': best[1] <= inner.value + tolerance,
    }


def _witness_entry(witness, ambient):
    """Block witness as JSON: matrices up to the size cap, a sha256 digest above it."""
    entry = {
        'kind': witness.kind,
        'depth': witness.depth,
        'value': witness.value,
        'sorts': dict(witness.sorts),
    }
    if ambient <= config.WITNESS_MATRIX_MAX_AMBIENT:
        entry['variables'] = {
            name: matrix_to_pairs(matrix) for name, matrix in sorted(witness.values.items())
        }
        return entry
    digest = hashlib.sha256()
    for name, matrix in sorted(witness.values.items()):
        digest.update(name.encode('utf-8'))
        digest.update(np.ascontiguousarray(matrix, dtype=complex).tobytes())
    entry['digest'] = f"sha256:{digest.hexdigest()}"
    return entry


def _side(algebra, result):
    return {
        'algebra': algebra.name,
        'dimension': algebra.dimension,
        'abelian': algebra.is_abelian(),
        'value': result.value,
        'gap_estimate': result.gap_estimate,
        'budget_used': result.budget_used,
        'witnesses': [_witness_entry(w, algebra.ambient) for w in result.witnesses],
    }


def run_t0_t1_experiment(group, k, m, budget=None, cross_check=False, history=None, trigger='manual'):
    """
    Compare tau_m on L(G^k) and L(G wr S_k).

    Args:
        group: FiniteGroup G
        k: Number of factors
        m: Size parameter of tau_m
        budget: EvalBudget shared by both sides
        cross_check: Re-run the wreath side with doubled restarts
        history: ExperimentHistory to record the run in, optional
        trigger: Trigger label stored with the record

    Returns:
        Report dict; two runs with the same inputs differ only in timestamps
    """
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise ValidationError(f"k must be a positive integer, got {k!r}")
    budget = budget or EvalBudget()
    started_at = datetime.now()
    try:
        report = _run(group, k, m, budget, cross_check, started_at)
    except Exception as exc:
        logger.error("Experiment on %s (k=%d, m=%s) failed: %s", group.name, k, m, exc)
        if history is not None:
            history.record_failure(
                started_at, datetime.now(), exc,
                run={'group': group.name, 'k': k, 'm': m, 'cross_check': cross_check},
                budget=budget.to_dict(), trigger=trigger,
            )
        raise

    if history is not None:
        history.create_record(started_at, datetime.now(), report, trigger=trigger)
    logger.info("Experiment finished: t0=%.6g t1=%.6g", report['t0']['value'], report['t1']['value'])
    return report


def _run(group, k, m, budget, cross_check, started_at):
    power = direct_power(group, k)
    product = wreath(group, k)
    t0 = group_algebra(power)
    t1 = group_algebra(product)
    tau = build_tau_m(m)
    logger.info("Experiment: tau_%d on %s and %s", m, t0.name, t1.name)

    r0 = evaluate(tau, t0, budget=budget)
    r1 = evaluate(tau, t1, budget=budget)

    t0_report = _side(t0, r0)
    if t0_report['abelian']:
        # Every commutator vanishes in an abelian algebra
        t0_report['exact_value'] = 0.0
    t1_report = _side(t1, r1)
    t1_report['permutation_unitary'] = best_permutation_unitary(t1, product, r1, m, budget.tolerance)

    report = {
        'group': group.name,
        'k': k,
        'm': m,
        't0': t0_report,
        't1': t1_report,
        'values_in_range': all(0.0 <= r.value <= 2.0 for r in (r0, r1)),
        'cross_check': None,
        'provenance': {
            'versions': _versions(),
            'seed': budget.seed,
            'budget': budget.to_dict(),
            'args': {'group': group.name, 'k': k, 'm': m, 'cross_check': cross_check},
            'algebras': {'t0': t0.name, 't1': t1.name},
            'timestamp': started_at.isoformat(),
        },
    }
    if cross_check:
        doubled = budget.doubled()
        check = evaluate(tau, t1, budget=doubled)
        report['cross_check'] = {
            'budget': doubled.to_dict(),
            'value': check.value,
            'agrees': abs(check.value - r1.value) <= max(budget.tolerance, r1.gap_estimate),
        }

    return report
