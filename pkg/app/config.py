import os
from pathlib import Path

# Get project root directory (parent of app/)
PROJECT_ROOT = Path(__file__).parent.parent

# Verification reports are written here by `qsys_cli.py verify --report`
REPORTS_DIR = PROJECT_ROOT / "reports"

# Truncation order N for every series (resolvents, generating functions)
DEFAULT_ORDER = int(os.environ.get("QSYS_ORDER", "8"))

# Desk-scale bounds. Polynomials grow quickly with the rank:
# r=4 with n up to m+6 is still a few seconds per seed, r=5 is not.
MAX_RANK = int(os.environ.get("QSYS_MAX_RANK", "4"))
MAX_DOWN_STEPS = 8      # exhaustive path enumeration
MAX_ENUM_VERTICES = 14  # graphs larger than this are not enumerated
MAX_HK_CHAIN = 4        # largest vertical chain checked by the H_k lemma

# Positivity suite scans n in [m_alpha + lo, m_alpha + hi]
POSITIVITY_WINDOW = (-6, 6)

# Times at which conserved quantities are recomputed (checked, not assumed)
CONSERVATION_TIMES = (0, 1, 2)

# Orbit length for the rank-2 conserved quantities
RANK2_ORBIT = 6

# Parallel verification (processes); 1 keeps everything in-process
DEFAULT_JOBS = int(os.environ.get("QSYS_JOBS", "1"))

# A check slower than this gets a warning in the report
SLOW_CHECK_SECONDS = 30.0

# Variable naming
SEED_VAR_FORMAT = "R{alpha}_{n}"   # Q-system seed entry R_{alpha,n}
RANK2_VAR_FORMAT = "x{k}"          # rank-2 cluster variable x_k
WEIGHT_VAR_FORMAT = "y{i}"         # abstract skeleton weight y_i

# Logging (handlers are configured by the CLI only)
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
