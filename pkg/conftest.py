"""
Shared pytest fixtures.
"""
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from algebra import matrix_algebra, group_algebra, cyclic_group, symmetric_group  # noqa: E402
from evaluator import EvalBudget, ExperimentHistory  # noqa: E402

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@pytest.fixture
def m2():
    return matrix_algebra(2)


@pytest.fixture
def c2():
    """C^2 as the group algebra of Z2."""
    return group_algebra(cyclic_group(2))


@pytest.fixture
def s3_algebra():
    return group_algebra(symmetric_group(3))


@pytest.fixture
def pauli():
    return PAULI_X, PAULI_Y, PAULI_Z


@pytest.fixture
def small_budget():
    return EvalBudget(restarts=3, iterations=80, nested_restarts=1, nested_iterations=12, seed=7)


@pytest.fixture
def history(tmp_path):
    return ExperimentHistory(history_file=str(tmp_path / 'history.json'))
