"""
Configuration settings for the Sentence Lab
"""
import os
from dotenv import load_dotenv
load_dotenv()

# Base directory
BASE_DIR = os.path.dirname(os.path.abspath(__file__))

# Data directories
DATA_DIR = os.path.join(BASE_DIR, 'data')
ALGEBRA_SPECS_DIR = os.path.join(DATA_DIR, 'algebras')
EXPERIMENT_HISTORY_FILE = os.path.join(DATA_DIR, 'experiment_history.json')
EXPERIMENT_HISTORY_LIMIT = 50  # Records kept in the history file

# Size guards
SIZE_CAP = int(os.environ.get('TL_SIZE_CAP', 64))  # Ambient dimension / group order cap
EMIT_LEVEL_GUARD = 6  # Largest n accepted by `emit`, the AST grows geometrically
GROUP_VALIDATION_EXHAUSTIVE_MAX = 512  # Group laws checked exhaustively up to this order
GROUP_VALIDATION_SAMPLES = 20000
CLOSURE_EXHAUSTIVE_MAX = 64  # Basis size up to which all products are checked

# Numerical tolerances
MEMBERSHIP_TOL = 1e-10
CLOSURE_TOL = 1e-12
UNITARY_TOL = 1e-9
BALL_TOL = 1e-9
RANK_TOL = 1e-9  # Relative singular value cutoff for spans and null spaces

# Good pairs, (p, c)-residual check
GOOD_PAIR_EXPONENT = 2
GOOD_PAIR_CONSTANT = 100.0
GOOD_PAIR_NUMERIC_STARTS = 8  # Starts of the numerical path when p != 2

# Quantification over relative commutants
UNITARY_PENALTY_FACTOR = 3.0  # Unitary within 3*d(u, N) of a unitary of N

# Evaluator defaults
EVAL_RESTARTS = 8
EVAL_ITERATIONS = 200
EVAL_NESTED_RESTARTS = 1
EVAL_NESTED_ITERATIONS = 24
EVAL_TOLERANCE = 1e-4
EVAL_SEED = 0
EVAL_WORKERS = int(os.environ.get('TL_WORKERS', 1))  # Threads for root-level restarts
EVAL_INITIAL_STEP = 0.5  # First step length of the projected search
EVAL_MIN_STEP = 1e-9  # The search ends once its step falls below this
EVAL_FD_STEP = 1e-7  # Central-difference step for gradients
EVAL_DIRECTION_TRIES = 8  # Failed random directions before a high-dimensional search ends
EVAL_POLISH_STEP = 0.05  # Simplex edge of the Nelder-Mead polish
NELDER_MEAD_MAX_DIM = 24  # No simplex polish above this many real parameters
STRUCTURED_STARTS = 4  # Restarts that start at reference unitaries
SUBSPACE_CACHE_SIZE = 64  # Commutants kept per evaluation

# Experiment reports
WITNESS_MATRIX_MAX_AMBIENT = int(os.environ.get('TL_WITNESS_MAX_AMBIENT', 16))  # Larger witnesses are reported as digests

# Grid oracle
ORACLE_GRID_POINTS = 9  # Points per real axis
ORACLE_MAX_POINTS = 2_000_000  # Total objective evaluations allowed
ORACLE_MAX_ABELIAN_DIM = 3
ORACLE_MAX_REAL_DIM = 6

# Built-in groups
BUILTIN_GROUPS = ['Z2', 'Z3', 'Z4', 'S3']
