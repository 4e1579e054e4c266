import math

# =============================================================================
# LOGGING CONFIGURATION
# =============================================================================

LOG_LEVEL = "INFO"  # DEBUG, INFO, WARNING, ERROR, CRITICAL
LOG_FILE = "spinbattery.log"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_MAX_SIZE = 10 * 1024 * 1024  # 10MB
LOG_BACKUP_COUNT = 5

# =============================================================================
# NUMERICAL TOLERANCES
# =============================================================================

HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-10
DENSITY_TOL = 1e-8

# =============================================================================
# EVOLUTION
# =============================================================================

SPECTRAL_MAX_DIM = 1024  # auto backend switches to Krylov above this
KRYLOV_SUBSPACE_DIM = 30
KRYLOV_STEP_SIZE = 0.05
KRYLOV_TOLERANCE = 1e-10

# =============================================================================
# MODEL DEFAULTS
# =============================================================================

DEFAULT_HBAR = 1.0
DEFAULT_OMEGA0 = 1.0
DEFAULT_OMEGA = 1.0
DEFAULT_J = 1.0

# Ising grids carry an odd sample count so t = pi/2 lands on a sample.
ISING_T_MAX = math.pi
ISING_SAMPLES = 401
XXZ_T_MAX = 3 * math.pi
XXZ_SAMPLES = 1200

# =============================================================================
# METRICS AND OUTPUT
# =============================================================================

PEAK_PROMINENCE_FRACTION = 0.01
CSV_DECIMALS = 12
SVG_WIDTH = 640
SVG_HEIGHT = 400

SWEEP_WORKERS = 4
