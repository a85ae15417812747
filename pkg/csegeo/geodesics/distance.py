"""
Edge-graph geodesic distances for csegeo.
This module discretizes the surface distance d_S with Dijkstra over mesh edges.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.sparse import csgraph

from csegeo.mesh.mesh import Mesh
from csegeo.utils.errors import ParameterError


@dataclass(frozen=True, eq=False)
class DistanceField:
    """
    Distances from one source vertex; np.inf marks vertices beyond the
    truncation radius.
    """

    source: int
    distances: np.ndarray
    truncation_radius: Optional[float] = None

    @property
    def reached(self) -> np.ndarray:
        return np.isfinite(self.distances)


def _check_sources(mesh: Mesh, sources: np.ndarray) -> None:
    if np.any((sources < 0) | (sources >= mesh.num_vertices)):
        raise ParameterError(f"source vertex out of range [0, {mesh.num_vertices})")


def _limit(radius: Optional[float]) -> float:
    if radius is None:
        return np.inf
    if radius < 0:
        raise ParameterError("truncation radius must be nonnegative")
    return float(radius)


def dijkstra(mesh: Mesh, source: int, radius: Optional[float] = None) -> DistanceField:
    """
    Shortest-path distances over the edge graph weighted by edge length.

    Args:
        mesh: Mesh to search
        source: Source vertex index
        radius: Stop the search at this distance (None searches everything)

    Returns:
        DistanceField for the source
    """
    source = int(source)
    _check_sources(mesh, np.asarray([source]))
    distances = csgraph.dijkstra(mesh.edge_graph, directed=False, indices=source, limit=_limit(radius))
    distances.setflags(write=False)
    return DistanceField(source=source, distances=distances, truncation_radius=radius)


def distance_matrix(mesh: Mesh, sources: Sequence[int], radius: Optional[float] = None) -> np.ndarray:
    """
    Batch Dijkstra; row i holds the distances from sources[i].
    """
    sources = np.asarray(sources, dtype=np.int64).reshape(-1)
    if sources.size == 0:
        return np.zeros((0, mesh.num_vertices))
    _check_sources(mesh, sources)
    distances = csgraph.dijkstra(mesh.edge_graph, directed=False, indices=sources, limit=_limit(radius))
    return np.atleast_2d(distances)


def estimate_diameter(mesh: Mesh, samples: int = 64) -> float:
    """
    Approximate the geodesic diameter with farthest-point sampling.

    Starting from vertex 0, each new seed is the vertex farthest from all
    seeds so far; the estimate is the largest distance seen from any seed.

    Args:
        mesh: Connected mesh
        samples: Number of seeds (capped at the vertex count)

    Returns:
        Estimated maximum pairwise geodesic distance
    """
    if samples < 1:
        raise ParameterError("diameter estimation needs at least one sample")
    samples = min(samples, mesh.num_vertices)

    seed = 0
    nearest = np.full(mesh.num_vertices, np.inf)
    diameter = 0.0
    for _ in range(samples):
        distances = dijkstra(mesh, seed).distances
        diameter = max(diameter, float(np.max(distances)))
        nearest = np.minimum(nearest, distances)
        seed = int(np.argmax(nearest))
    return diameter


def all_pairs_diameter(mesh: Mesh) -> float:
    """Exact edge-graph diameter from all-pairs Dijkstra (O(K^2) memory)."""
    distances = csgraph.dijkstra(mesh.edge_graph, directed=False)
    return float(np.max(distances))
