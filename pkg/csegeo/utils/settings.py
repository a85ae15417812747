"""
Environment-driven settings for csegeo.
"""

import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Dense eigensolve up to this many vertices, shift-invert Lanczos above
DENSE_EIGEN_LIMIT = int(os.getenv("CSEGEO_DENSE_EIGEN_LIMIT", "8192"))

# Iteration cap handed to ARPACK on the Lanczos path
LANCZOS_MAXITER = int(os.getenv("CSEGEO_LANCZOS_MAXITER", "20000"))

# Threads for exact nearest-row queries (-1 uses all cores; results do not depend on it)
WORKERS = int(os.getenv("CSEGEO_WORKERS", "-1"))

# Soft-label bandwidth after normalization to diameter 2.5
DEFAULT_SIGMA = float(os.getenv("CSEGEO_DEFAULT_SIGMA", "0.1"))

# Geodesic diameter that every mesh is normalized to for evaluation
TARGET_DIAMETER = float(os.getenv("CSEGEO_TARGET_DIAMETER", "2.5"))

# Desk-scale acceptance suite is opt-in
RUN_ACCEPTANCE = os.getenv("CSEGEO_RUN_ACCEPTANCE", "0") == "1"
