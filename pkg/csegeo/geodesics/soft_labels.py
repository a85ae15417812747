"""
Geodesic soft labels for the smoothed cross-entropy loss.

g(q; k) is proportional to exp(-d(X_q, X_k) / (2 sigma^2)), normalized over
all vertices. The exponent is linear in the distance; the "squared" kernel
uses d^2 instead.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

import numpy as np

from csegeo.geodesics.distance import dijkstra, distance_matrix
from csegeo.mesh.mesh import Mesh
from csegeo.utils.errors import ParameterError
from csegeo.utils.logger import log_debug

KERNELS = ("linear", "squared")

# Magnitude of the exponent at the truncation radius
EXPONENT_CUTOFF = 10.0


@dataclass(frozen=True, eq=False)
class SoftLabelField:
    """Normalized proximity weights around one center vertex."""

    center: int
    sigma: float
    weights: np.ndarray
    mesh_id: str
    kernel: str = "linear"


def _check(sigma: float, kernel: str) -> None:
    if not sigma > 0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    if kernel not in KERNELS:
        raise ParameterError(f"unknown kernel {kernel!r}; use one of {KERNELS}")


def truncation_radius(sigma: float, kernel: str = "linear") -> float:
    """Distance at which the kernel exponent reaches -10 (20 sigma^2 for linear)."""
    _check(sigma, kernel)
    if kernel == "linear":
        return 2.0 * sigma ** 2 * EXPONENT_CUTOFF
    return sigma * np.sqrt(2.0 * EXPONENT_CUTOFF)


def _weights(distances: np.ndarray, sigma: float, kernel: str) -> np.ndarray:
    reached = np.isfinite(distances)
    d = np.where(reached, distances, 0.0)
    exponent = -(d if kernel == "linear" else d ** 2) / (2.0 * sigma ** 2)
    weights = np.where(reached, np.exp(exponent), 0.0)
    # weights sum to at least 1: the center always contributes exp(0)
    return weights / np.sum(weights, axis=-1, keepdims=True)


def soft_labels(mesh: Mesh, k: int, sigma: float, kernel: str = "linear") -> SoftLabelField:
    """
    Soft-label distribution centered on vertex k.

    Args:
        mesh: Mesh the labels live on
        k: Center vertex
        sigma: Bandwidth (> 0)
        kernel: "linear" (default) or "squared" distance in the exponent

    Returns:
        SoftLabelField with weights summing to 1
    """
    _check(sigma, kernel)
    field = dijkstra(mesh, k, radius=truncation_radius(sigma, kernel))
    weights = _weights(field.distances, sigma, kernel)
    weights.setflags(write=False)
    return SoftLabelField(center=int(k), sigma=float(sigma), weights=weights, mesh_id=mesh.mesh_id, kernel=kernel)


def soft_label_fields(mesh: Mesh, centers: Iterable[int], sigma: float, kernel: str = "linear") -> List[SoftLabelField]:
    """Batch version of soft_labels; results follow the order of `centers`."""
    _check(sigma, kernel)
    centers = [int(c) for c in centers]
    distances = distance_matrix(mesh, centers, radius=truncation_radius(sigma, kernel))
    fields = []
    for center, row in zip(centers, distances):
        weights = _weights(row, sigma, kernel)
        weights.setflags(write=False)
        fields.append(SoftLabelField(center=center, sigma=float(sigma), weights=weights,
                                     mesh_id=mesh.mesh_id, kernel=kernel))
    return fields


class SoftLabelCache:
    """
    Soft-label fields keyed by (mesh hash, center, sigma, kernel).
    """

    def __init__(self):
        """
        Initialize an empty cache.
        """
        self._fields: Dict[Tuple[str, int, float, str], SoftLabelField] = {}

    def __len__(self) -> int:
        return len(self._fields)

    def add(self, field: SoftLabelField) -> None:
        self._fields[(field.mesh_id, field.center, field.sigma, field.kernel)] = field

    def get(self, mesh: Mesh, k: int, sigma: float, kernel: str = "linear") -> SoftLabelField:
        key = (mesh.mesh_id, int(k), float(sigma), kernel)
        if key not in self._fields:
            self._fields[key] = soft_labels(mesh, k, sigma, kernel)
        return self._fields[key]

    def fields_for(self, mesh: Mesh, labels: Iterable[int], sigma: float,
                   kernel: str = "linear") -> Dict[int, SoftLabelField]:
        """
        Fields for every distinct label, computing the missing ones in one batch.

        Args:
            mesh: Mesh the labels refer to
            labels: Vertex labels (duplicates allowed)
            sigma: Bandwidth
            kernel: Kernel form

        Returns:
            Dict mapping each distinct label to its field
        """
        centers = sorted({int(k) for k in labels})
        missing = [k for k in centers if (mesh.mesh_id, k, float(sigma), kernel) not in self._fields]
        if missing:
            log_debug(f"Computing {len(missing)} soft-label fields (sigma={sigma}, kernel={kernel})")
            for field in soft_label_fields(mesh, missing, sigma, kernel):
                self.add(field)
        return {k: self._fields[(mesh.mesh_id, k, float(sigma), kernel)] for k in centers}

    def entries(self, mesh_id: str, sigma: float, kernel: str = "linear") -> List[SoftLabelField]:
        """Cached fields for one (mesh, sigma, kernel), ordered by center."""
        selected = [f for (m, _, s, kern), f in self._fields.items()
                    if m == mesh_id and s == float(sigma) and kern == kernel]
        return sorted(selected, key=lambda f: f.center)
