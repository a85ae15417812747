"""
Initialization file for geodesics package.
"""

# Import geodesic components to make them available
from csegeo.geodesics.distance import DistanceField, dijkstra, distance_matrix, estimate_diameter, all_pairs_diameter
from csegeo.geodesics.soft_labels import (
    SoftLabelField,
    SoftLabelCache,
    soft_labels,
    soft_label_fields,
    truncation_radius,
)
