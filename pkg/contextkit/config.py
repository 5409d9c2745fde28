"""
Configuration and constants for contextkit
"""

import os

APP_NAME = "contextkit"
SCHEMA_VERSION = "1.0"

# Tolerances
EPS_SUM = float(os.environ.get("CONTEXTKIT_EPS_SUM", "1e-9"))
EPS_CONTEXT = float(os.environ.get("CONTEXTKIT_EPS", "1e-9"))
DELTA_PIVOT = float(os.environ.get("CONTEXTKIT_DELTA_PIVOT", "1e-8"))
RANK_RTOL = float(os.environ.get("CONTEXTKIT_RANK_RTOL", "1e-10"))
SIGNED_RESIDUAL_TOL = float(os.environ.get("CONTEXTKIT_SIGNED_RESIDUAL", "1e-8"))
PROJECTION_TOL = float(os.environ.get("CONTEXTKIT_PROJECTION_TOL", "1e-9"))

# Lovász theta SDP
THETA_TOL = float(os.environ.get("CONTEXTKIT_THETA_TOL", "1e-4"))
SDP_MAX_ITERS = int(os.environ.get("CONTEXTKIT_SDP_MAX_ITERS", "200"))

# Resource caps (exceeding one maps to exit code 3)
ASSIGNMENT_CAP = int(os.environ.get("CONTEXTKIT_ASSIGNMENT_CAP", str(2 ** 24)))
OUTCOME_SPACE_CAP = int(os.environ.get("CONTEXTKIT_OUTCOME_CAP", str(2 ** 20)))
MWIS_VERTEX_CAP = int(os.environ.get("CONTEXTKIT_MWIS_CAP", "40"))
THETA_VERTEX_CAP = int(os.environ.get("CONTEXTKIT_THETA_CAP", "25"))
NCHV_VERTEX_CAP = int(os.environ.get("CONTEXTKIT_NCHV_CAP", "64"))
CLIQUE_CAP = int(os.environ.get("CONTEXTKIT_CLIQUE_CAP", "100000"))

# A float counts as rational when it equals a fraction with at most this denominator
RATIONAL_MAX_DENOMINATOR = int(os.environ.get("CONTEXTKIT_MAX_DENOMINATOR", str(10 ** 6)))

# Monte Carlo
MARBLE_BATCH_SIZE = int(os.environ.get("CONTEXTKIT_MARBLE_BATCH", "10000"))
KS_SEARCH_BUDGET = int(os.environ.get("CONTEXTKIT_KS_BUDGET", "2000"))
CONFIDENCE_Z = 2.5758293035489004  # two-sided 99%
# Ontic states drawn when a prior is discretized for export
MARBLE_DISCRETE_STATES = int(os.environ.get("CONTEXTKIT_MARBLE_STATES", "200"))

DEFAULT_SEED = int(os.environ.get("CONTEXTKIT_SEED", "0"))
DEFAULT_JOBS = int(os.environ.get("CONTEXTKIT_JOBS", "1"))

LOG_LEVEL = os.environ.get("CONTEXTKIT_LOG_LEVEL", "WARNING").upper()
