"""
Initialization file for fmaps package.
"""

# Import functional map components to make them available
from csegeo.fmaps.functional_map import (
    FunctionalMap,
    PointMap,
    cfrom_pointmap,
    pointmap_from_c,
    seed_cinit,
    symmetry_operator,
    recovery_rate,
    nearest_rows,
)
from csegeo.fmaps.zoomout import zoomout, project_penalties, penalty_value
