"""
LogSpace Toolkit Configuration
Contains the tolerance hierarchy and shared configuration constants.
"""

__version__ = "0.1.0"

# Structural equalities: weights, measures, totals, multiplier/density identity.
STRUCTURAL_RTOL = 1e-9

# Pointwise equalities between function values.
POINTWISE_ATOL = 1e-12

# Two F-norm values agree when their absolute gap is below this.
NORM_ATOL = 1e-9

# Values with |v| <= SUPPORT_ATOL count as zero when computing supports.
SUPPORT_ATOL = 1e-12

# Step lengths of one component must sum to 1 within this tolerance.
LENGTH_SUM_TOL = 1e-9

# Randomized verification defaults
DEFAULT_TRIALS = 100
DEFAULT_SEED = 20190914

# Exhaustive atom matching is limited to this many atoms (8! bijections).
BRUTE_FORCE_MAX_ATOMS = 8

# Default separating lambdas are capped here so ln(1 + lambda) stays finite.
SEPARATION_LAMBDA_MAX = 1e300

# Reports serialize floats with this many significant digits.
REPORT_SIGNIFICANT_DIGITS = 17

LOG_FORMAT = "%(asctime)s | %(levelname)s | %(message)s"

# Exit statuses of the command-line front end
EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT_ERROR = 2

# Labels attached to decisions that go beyond the non-atomic classification
EXTENSION_ATOMIC_MATCHING = "atomic-matching"
EXTENSION_MIXED_SPACES = "mixed-spaces"

# Sizes used by the selftest suites
SUITE_SIZES = {
    "measure_additivity": 200,
    "radon_nikodym": 200,
    "passport_idempotence": 100,
    "fnorm_axioms": 1000,
    "indicator_norm": 100,
    "measure_preserving": 200,
    "measure_preserving_functions": 50,
    "isometry_algebra": 100,
    "decomposition_round_trip": 200,
    "disjointness_negative_control": 500,
    "separation_certificate": 100,
    "classification_oracle": 500,
    "passport_criterion": 100,
}
