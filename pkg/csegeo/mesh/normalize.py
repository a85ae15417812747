"""
Size normalization for csegeo meshes.
"""

from typing import Tuple

from csegeo.mesh.mesh import Mesh
from csegeo.utils.errors import ParameterError
from csegeo.utils.logger import log_info
from csegeo.utils.settings import TARGET_DIAMETER

# Farthest-point seeds used to approximate the geodesic diameter
DIAMETER_SAMPLES = 64


def normalize_mesh(mesh: Mesh, target_diameter: float = TARGET_DIAMETER,
                   samples: int = DIAMETER_SAMPLES) -> Tuple[Mesh, float]:
    """
    Rescale a mesh so its geodesic diameter equals target_diameter.

    The diameter is approximated from a farthest-point sample of vertices.

    Args:
        mesh: Connected mesh
        target_diameter: Desired maximum pairwise geodesic distance
        samples: Number of farthest-point seeds

    Returns:
        Tuple of the rescaled mesh and the applied scale factor
    """
    if target_diameter <= 0:
        raise ParameterError("target diameter must be positive")
    from csegeo.geodesics.distance import estimate_diameter

    diameter = estimate_diameter(mesh, samples=samples)
    scale = target_diameter / diameter
    log_info(f"Normalizing mesh {mesh.mesh_id[:12]}: diameter {diameter:.6g} -> {target_diameter} (scale {scale:.6g})")
    return mesh.scaled(scale), scale


def normalize_area(mesh: Mesh, target_area: float) -> Tuple[Mesh, float]:
    """
    Rescale a mesh to a given total surface area.

    Args:
        mesh: Mesh to rescale
        target_area: Desired total area

    Returns:
        Tuple of the rescaled mesh and the applied scale factor
    """
    if target_area <= 0:
        raise ParameterError("target area must be positive")
    scale = (target_area / mesh.total_area) ** 0.5
    return mesh.scaled(scale), scale
