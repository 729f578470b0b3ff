"""
Numeric defaults and tolerances shared by the library and the CLI.

Quadratures are dimensionless with hbar = 1; the vacuum quadrature variance is 1/2.
"""

import math

VACUUM_VARIANCE = 0.5
UNCERTAINTY_BOUND = 0.25

# State models
PHYSICALITY_TOLERANCE = 1e-12

# Tomogram grids
DEFAULT_X_RANGE = (-7.0, 7.0, 281)
X_RANGE_STANDARD_DEVIATIONS = 9.0
DEFAULT_THETA_COUNT = 48
EPS_NORM_ANALYTIC = 1e-6
EPS_NORM_MEASURED = 1e-3
UNIFORM_SPACING_RTOL = 1e-12
ANGLE_MATCH_TOLERANCE = 1e-9
MAX_INTERPOLATION_GAP = math.pi / 24
QUADRATURE_RULES = ("trapezoid", "simpson")

# Sample sets
MIN_SAMPLES_PER_PHASE = 1000
DEFAULT_THETA_TOLERANCE = 1e-6

# Uncertainty checks
BOOTSTRAP_REPLICATES = 200
GRID_PASS_SLACK = 1e-9
SAMPLE_PASS_STANDARD_ERRORS = 3.0
DEFAULT_SCAN_STEP = math.pi / 48
DEFAULT_REPORT_SEED = 0

# Radon transforms
DEFAULT_RECONSTRUCTION_RANGE = (-6.0, 6.0, 241)
DEFAULT_FILTER_CUTOFF = 0.9
FILTER_WINDOWS = ("ramp", "cosine")
MIN_RECONSTRUCTION_ANGLES = 8
MAX_RECONSTRUCTION_GAP = math.pi / 8
SUPPORT_TAIL_TOLERANCE = 1e-3

# Sampler
RNG_ALGORITHM = "numpy.random.PCG64 (SeedSequence spawn per phase)"
FOCK_ENVELOPE_MARGIN = 1.1
FOCK_ENVELOPE_POINTS = 2001
FOCK_ENVELOPE_HALF_WIDTH = 7.0
FOCK_MIN_ACCEPTANCE = 0.3
